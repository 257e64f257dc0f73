#include "swmlda/errors.hpp"
#include "swmlda/projection.hpp"
#include "swmlda/saliency.hpp"

#include <doctest.h>

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace swmlda;

namespace {

double relative_frobenius(const Eigen::MatrixXd& got, const Eigen::MatrixXd& ref) {
  const double scale = std::max(ref.norm(), 1.0);
  return (got - ref).norm() / scale;
}

}  // namespace

TEST_SUITE_BEGIN("projection");

TEST_CASE("scatter pair codes round-trip") {
  CHECK(scatter_pair_from_code("b_over_t") == ScatterPair::b_over_t);
  CHECK(scatter_pair_from_code("b_over_w") == ScatterPair::b_over_w);
  CHECK(scatter_pair_code(ScatterPair::b_over_w) == "b_over_w");
  CHECK_THROWS_AS(scatter_pair_from_code("b_over_x"), ConfigError);
}

TEST_CASE("scatter hand value on three points") {
  // x = 0, 1 in class 1 with weights 1/2 each; x = 2 alone in class 2.
  // mu_1 = 1/2, so S_w = 1/2 (0-1/2)^2 + 1/2 (1-1/2)^2 = 1/4.
  Eigen::MatrixXd X(1, 3);
  X << 0, 1, 2;
  Eigen::MatrixXd P(2, 3);
  P << 0.5, 0.5, 0.0,
      0.0, 0.0, 1.0;
  const ScatterSet s = scatter_matrices(X, P);
  CHECK(s.Sw(0, 0) == doctest::Approx(0.25));
  CHECK(s.n == doctest::Approx(2.0));
  CHECK(s.classes == 2);
  CHECK(s.St(0, 0) == doctest::Approx(s.Sw(0, 0) + s.Sb(0, 0)));
}

TEST_CASE("scatter matrices match the summation definition") {
  for (unsigned seed = 0; seed < 30; ++seed) {
    const int D = 2 + static_cast<int>(seed % 5);
    const int N = 8 + static_cast<int>(seed % 12);
    const int C = 2 + static_cast<int>(seed % 3);
    const Eigen::MatrixXd X = Eigen::MatrixXd::Random(D, N);
    const Eigen::MatrixXd P = gen::random_weights(seed, C, N);
    const ScatterSet s = scatter_matrices(X, P);
    const oracle::ScatterRef ref = oracle::scatter_by_summation(X, P);
    CHECK(relative_frobenius(s.Sw, ref.Sw) < 1e-10);
    CHECK(relative_frobenius(s.Sb, ref.Sb) < 1e-10);
    CHECK(relative_frobenius(s.St, ref.St) < 1e-10);
    CHECK(relative_frobenius(s.St, s.Sw + s.Sb) < 1e-10);
  }
}

TEST_CASE("scatter input validation") {
  const Eigen::MatrixXd X = Eigen::MatrixXd::Random(2, 5);
  CHECK_THROWS_AS(scatter_matrices(X, Eigen::MatrixXd::Ones(2, 4)), DataError);
  CHECK_THROWS_AS(scatter_matrices(X, Eigen::MatrixXd::Constant(2, 5, -0.25)), NumericError);
  CHECK_THROWS_AS(scatter_matrices(X, Eigen::MatrixXd::Zero(2, 5)), NumericError);
}

TEST_CASE("projection recovers the discriminative axis of a diagonal pencil") {
  // S_b = diag(2, 0) against S_t = diag(3, 1): eigenvalues 2/3 and 0, so the
  // energy rule keeps one direction along the first axis.
  ScatterSet s;
  s.Sb = Eigen::Vector2d(2.0, 0.0).asDiagonal();
  s.Sw = Eigen::Vector2d(1.0, 1.0).asDiagonal();
  s.St = s.Sw + s.Sb;
  s.n = 10.0;
  s.classes = 3;
  const Projection proj = fit_projection(s, ScatterPair::b_over_t, 0.999, 0.0);
  REQUIRE(proj.W.cols() == 1);
  CHECK(proj.eigenvalues(0) == doctest::Approx(2.0 / 3.0));
  const Eigen::VectorXd dir = proj.W.col(0).normalized();
  CHECK(dir(0) == doctest::Approx(1.0));
  CHECK(std::abs(dir(1)) < 1e-10);
  CHECK(proj.W(0, 0) > 0.0);  // sign canonicalization
}

TEST_CASE("two-class projection reproduces the classic discriminant direction") {
  // With two single-label classes under row-normalized binary weights the
  // discriminant subspace is spanned by S_t^-1 (mu_1 - mu_2); check the
  // angle against that closed form.
  const MultiLabelDataset ds = gen::random_dataset(3, 4, 40, 2, {.extra_label_prob = 0.0});
  Eigen::MatrixXd P = ds.Y;
  for (Eigen::Index c = 0; c < P.rows(); ++c) P.row(c) /= P.row(c).sum();
  const ScatterSet s = scatter_matrices(ds.X, P);
  const Projection proj = fit_projection(s, ScatterPair::b_over_t, 0.999, 0.0);
  REQUIRE(proj.W.cols() == 1);

  const Eigen::VectorXd mu1 = gen::member_columns(ds, 0).rowwise().mean();
  const Eigen::VectorXd mu2 = gen::member_columns(ds, 1).rowwise().mean();
  const Eigen::VectorXd fisher = s.St.ldlt().solve(mu1 - mu2).normalized();
  const double cosine = std::abs(fisher.dot(proj.W.col(0).normalized()));
  CHECK(std::acos(std::min(cosine, 1.0)) < 1e-6);
}

TEST_CASE("vanishing between-class scatter is a numeric error") {
  ScatterSet s;
  s.Sb = Eigen::MatrixXd::Zero(2, 2);
  s.Sw = Eigen::MatrixXd::Identity(2, 2);
  s.St = s.Sw;
  s.n = 4.0;
  s.classes = 2;
  CHECK_THROWS_AS(fit_projection(s, ScatterPair::b_over_t, 0.999, 0.0), NumericError);
}

TEST_CASE("projection is permutation-invariant up to column sign") {
  const MultiLabelDataset ds = gen::random_dataset(27, 5, 26, 3, {.extra_label_prob = 0.3});
  const WeightMatrix P = baseline_weight_matrix(ds, BaselineForm::entropy);

  std::vector<Eigen::Index> perm(static_cast<size_t>(ds.n_instances()));
  std::iota(perm.begin(), perm.end(), Eigen::Index{0});
  std::mt19937 rng(99);
  std::shuffle(perm.begin(), perm.end(), rng);
  Eigen::MatrixXd Xp(ds.X.rows(), ds.X.cols());
  Eigen::MatrixXd Pp(P.P.rows(), P.P.cols());
  for (Eigen::Index i = 0; i < ds.n_instances(); ++i) {
    Xp.col(i) = ds.X.col(perm[static_cast<size_t>(i)]);
    Pp.col(i) = P.P.col(perm[static_cast<size_t>(i)]);
  }

  const Projection a = fit_projection_from_data(ds.X, P.P, ScatterPair::b_over_t, 0.999, 0.0);
  const Projection b = fit_projection_from_data(Xp, Pp, ScatterPair::b_over_t, 0.999, 0.0);
  REQUIRE(a.W.cols() == b.W.cols());
  for (Eigen::Index j = 0; j < a.W.cols(); ++j) {
    const double diff_same = (a.W.col(j) - b.W.col(j)).norm();
    const double diff_flip = (a.W.col(j) + b.W.col(j)).norm();
    CHECK(std::min(diff_same, diff_flip) < 1e-8);
  }
}

TEST_CASE("fitted directions beat random subspaces on the discriminant objective") {
  const MultiLabelDataset ds = gen::random_dataset(33, 5, 30, 3, {.extra_label_prob = 0.25});
  const WeightMatrix P = baseline_weight_matrix(ds, BaselineForm::binary);
  const ScatterSet s = scatter_matrices(ds.X, P.P);
  const Projection proj = fit_projection(s, ScatterPair::b_over_t, 0.999, 0.0);
  // tr((W'StW)^-1 W'SbW) depends only on the span of W and is maximized by the
  // leading generalized eigenspace, so any other subspace of equal dimension
  // must score no higher.
  const auto ratio = [&](const Eigen::MatrixXd& W) {
    const Eigen::MatrixXd num = W.transpose() * s.Sb * W;
    const Eigen::MatrixXd den = W.transpose() * s.St * W;
    return den.ldlt().solve(num).trace();
  };
  const double fitted = ratio(proj.W);
  std::mt19937 rng(7);
  std::normal_distribution<double> gauss;
  for (int trial = 0; trial < 50; ++trial) {
    Eigen::MatrixXd R(s.Sb.rows(), proj.W.cols());
    for (Eigen::Index i = 0; i < R.rows(); ++i)
      for (Eigen::Index j = 0; j < R.cols(); ++j) R(i, j) = gauss(rng);
    const Eigen::MatrixXd Q = Eigen::HouseholderQR<Eigen::MatrixXd>(R)
                                  .householderQ() *
                              Eigen::MatrixXd::Identity(R.rows(), R.cols());
    CHECK(fitted >= ratio(Q) - 1e-8);
  }
}

TEST_CASE("total-scatter eigenvalues stay within the unit interval") {
  for (unsigned seed = 0; seed < 15; ++seed) {
    const MultiLabelDataset ds =
        gen::random_dataset(seed, 5, 30, 3, {.extra_label_prob = 0.25});
    const WeightMatrix P = baseline_weight_matrix(ds, BaselineForm::entropy);
    const ScatterSet s = scatter_matrices(ds.X, P.P);
    const Projection proj = fit_projection(s, ScatterPair::b_over_t, 0.999);
    CHECK(proj.W.cols() >= 1);
    CHECK(proj.W.cols() <= s.classes - 1);
    for (Eigen::Index j = 0; j < proj.eigenvalues.size(); ++j) {
      CHECK(proj.eigenvalues(j) > 0.0);
      CHECK(proj.eigenvalues(j) <= 1.0 + 1e-8);
      if (j > 0) CHECK(proj.eigenvalues(j) <= proj.eigenvalues(j - 1) + 1e-12);
    }
  }
}

TEST_CASE("energy threshold trims trailing directions") {
  ScatterSet s;
  s.Sb = Eigen::Vector3d(8.0, 1.0, 1.0).asDiagonal();
  s.Sw = Eigen::MatrixXd::Identity(3, 3);
  s.St = s.Sw + s.Sb;
  s.n = 20.0;
  s.classes = 4;
  // Eigenvalues of the w-pencil are 8, 1, 1 -> energy 0.8 keeps the first.
  const Projection low = fit_projection(s, ScatterPair::b_over_w, 0.8, 0.0);
  CHECK(low.W.cols() == 1);
  const Projection high = fit_projection(s, ScatterPair::b_over_w, 0.999, 0.0);
  CHECK(high.W.cols() == 3);
}

TEST_CASE("rank cap keeps at most classes minus one directions") {
  const MultiLabelDataset ds = gen::random_dataset(9, 6, 40, 2, {.extra_label_prob = 0.2});
  const WeightMatrix P = baseline_weight_matrix(ds, BaselineForm::binary);
  const Projection proj = fit_projection_from_data(ds.X, P.P, ScatterPair::b_over_t, 0.999);
  CHECK(proj.W.cols() == 1);
}

TEST_CASE("gram-path fit matches the scatter fit when features outnumber instances") {
  const MultiLabelDataset ds = gen::random_dataset(13, 40, 18, 3, {.extra_label_prob = 0.3});
  REQUIRE(ds.X.rows() > ds.X.cols());
  const WeightMatrix P = baseline_weight_matrix(ds, BaselineForm::entropy);

  const ScatterSet s = scatter_matrices(ds.X, P.P);
  const Projection primal = fit_projection(s, ScatterPair::b_over_t, 0.999, 1e-6);
  const Projection dual = fit_projection_from_data(ds.X, P.P, ScatterPair::b_over_t, 0.999, 1e-6);

  REQUIRE(primal.W.cols() == dual.W.cols());
  for (Eigen::Index j = 0; j < primal.eigenvalues.size(); ++j)
    CHECK(dual.eigenvalues(j) == doctest::Approx(primal.eigenvalues(j)).epsilon(1e-6));
  // Same subspace: projected data agree up to the canonical sign.
  const Eigen::MatrixXd Zp = transform(primal, ds.X);
  const Eigen::MatrixXd Zd = transform(dual, ds.X);
  CHECK(relative_frobenius(Zd, Zp) < 1e-6);
}

TEST_CASE("ridge resolution") {
  ScatterSet s;
  s.Sb = Eigen::Vector2d(1.0, 0.5).asDiagonal();
  s.Sw = Eigen::Vector2d(2.0, 2.0).asDiagonal();
  s.St = s.Sw + s.Sb;
  s.n = 5.0;
  s.classes = 3;
  const Projection fixed = fit_projection(s, ScatterPair::b_over_w, 0.999, 0.5);
  CHECK(fixed.ridge == 0.5);
  const Projection zero = fit_projection(s, ScatterPair::b_over_w, 0.999, 0.0);
  CHECK(zero.ridge == 0.0);
  const Projection automatic = fit_projection(s, ScatterPair::b_over_w, 0.999);
  CHECK(automatic.ridge == doctest::Approx(1e-8 * 4.0 / 2.0));
}

TEST_CASE("projection parameter validation") {
  ScatterSet s;
  s.Sb = Eigen::MatrixXd::Identity(2, 2);
  s.Sw = Eigen::MatrixXd::Identity(2, 2);
  s.St = s.Sw + s.Sb;
  s.n = 4.0;
  s.classes = 2;
  CHECK_THROWS_AS(fit_projection(s, ScatterPair::b_over_t, 0.0), ConfigError);
  CHECK_THROWS_AS(fit_projection(s, ScatterPair::b_over_t, 1.5), ConfigError);
  CHECK_THROWS_AS(fit_projection(s, ScatterPair::b_over_t, 0.999, -1.0), ConfigError);
}

TEST_CASE("transform applies the fitted directions and checks dimensions") {
  Projection proj;
  proj.W = Eigen::MatrixXd::Identity(3, 2);
  proj.eigenvalues = Eigen::Vector2d(1.0, 0.5);
  const Eigen::MatrixXd X = Eigen::MatrixXd::Random(3, 7);
  const Eigen::MatrixXd Z = transform(proj, X);
  CHECK(Z.rows() == 2);
  CHECK(Z.cols() == 7);
  CHECK(relative_frobenius(Z, proj.W.transpose() * X) == 0.0);
  CHECK_THROWS_AS(transform(proj, Eigen::MatrixXd::Random(4, 7)), DataError);
}

TEST_CASE("projection fit is deterministic") {
  const MultiLabelDataset ds = gen::random_dataset(21, 6, 35, 4, {.extra_label_prob = 0.3});
  const WeightMatrix P = baseline_weight_matrix(ds, BaselineForm::fuzzy);
  const Projection a = fit_projection_from_data(ds.X, P.P, ScatterPair::b_over_t, 0.999);
  const Projection b = fit_projection_from_data(ds.X, P.P, ScatterPair::b_over_t, 0.999);
  CHECK(a.W == b.W);
  CHECK(a.eigenvalues == b.eigenvalues);
}

TEST_SUITE_END();
