#include "swmlda/projection.hpp"

#include "swmlda/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace swmlda {

ScatterPair scatter_pair_from_code(const std::string& code) {
  if (code == "b_over_t") return ScatterPair::b_over_t;
  if (code == "b_over_w") return ScatterPair::b_over_w;
  throw ConfigError("unknown scatter pair '" + code + "' (expected b_over_t or b_over_w)");
}

std::string scatter_pair_code(ScatterPair pair) {
  return pair == ScatterPair::b_over_t ? "b_over_t" : "b_over_w";
}

namespace {

void validate_weights(const Eigen::MatrixXd& X, const Eigen::MatrixXd& P) {
  if (P.cols() != X.cols())
    throw DataError("dimension error: weight matrix covers " + std::to_string(P.cols()) +
                    " instances but X has " + std::to_string(X.cols()));
  if (!P.allFinite() || P.minCoeff() < 0.0)
    throw NumericError("weight matrix has negative or non-finite entries");
  if (!X.allFinite()) throw NumericError("feature matrix has non-finite entries");
}

/// Rows of P scaled by the inverse square root of their mass; zero rows stay
/// zero.  For rows already summing to one this is the identity.
Eigen::MatrixXd normalize_rows(const Eigen::MatrixXd& P) {
  Eigen::MatrixXd scaled = P;
  for (Eigen::Index c = 0; c < P.rows(); ++c) {
    const double mass = P.row(c).sum();
    if (mass > 0.0) scaled.row(c) /= std::sqrt(mass);
  }
  return scaled;
}

Eigen::MatrixXd symmetrized(const Eigen::MatrixXd& A) {
  return 0.5 * (A + A.transpose());
}

struct PencilSolution {
  Eigen::MatrixXd directions;  // r x d coefficients in the working basis
  Eigen::VectorXd eigenvalues;
  double ridge;
};

/// Solves S_b v = lambda (S_pair + ridge I) v inside an r-dimensional basis:
/// whiten the ridged pair matrix, eigendecompose the whitened S_b, apply the
/// energy rule over the positive spectrum, and cap the dimension.
PencilSolution solve_pencil(const Eigen::MatrixXd& Sb, const Eigen::MatrixXd& Spair,
                            double energy, std::optional<double> ridge,
                            Eigen::Index ambient_dim, Eigen::Index max_dim) {
  if (!(energy > 0.0 && energy <= 1.0))
    throw ConfigError("energy threshold must be in (0, 1], got " + std::to_string(energy));
  double ridge_value = ridge.value_or(1e-8 * Spair.trace() / static_cast<double>(ambient_dim));
  if (ridge_value < 0.0)
    throw ConfigError("ridge must be non-negative, got " + std::to_string(ridge_value));

  Eigen::MatrixXd M = Spair;
  M.diagonal().array() += ridge_value;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> pair_eig(M);
  if (pair_eig.info() != Eigen::Success)
    throw NumericError("eigendecomposition of the scatter pair failed");

  const double drop = 1e-12 * M.trace();
  std::vector<Eigen::Index> kept;
  for (Eigen::Index i = 0; i < pair_eig.eigenvalues().size(); ++i)
    if (pair_eig.eigenvalues()(i) > drop) kept.push_back(i);
  if (kept.empty())
    throw NumericError("degenerate projection: scatter pair has no usable directions");

  Eigen::MatrixXd whitener(M.rows(), static_cast<Eigen::Index>(kept.size()));
  for (size_t j = 0; j < kept.size(); ++j)
    whitener.col(static_cast<Eigen::Index>(j)) =
        pair_eig.eigenvectors().col(kept[j]) / std::sqrt(pair_eig.eigenvalues()(kept[j]));

  const Eigen::MatrixXd A = symmetrized(whitener.transpose() * Sb * whitener);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> sb_eig(A);
  if (sb_eig.info() != Eigen::Success)
    throw NumericError("eigendecomposition of the whitened between-class scatter failed");

  // Eigen reports ascending order; walk from the back for descending.
  const Eigen::Index r = A.rows();
  std::vector<Eigen::Index> order(static_cast<size_t>(r));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::reverse(order.begin(), order.end());

  double total_positive = 0.0;
  Eigen::Index positive_count = 0;
  for (Eigen::Index i = 0; i < r; ++i) {
    if (sb_eig.eigenvalues()(i) > 0.0) {
      total_positive += sb_eig.eigenvalues()(i);
      ++positive_count;
    }
  }
  if (positive_count == 0)
    throw NumericError("degenerate projection: between-class scatter has no positive directions");

  const double target = energy * total_positive;
  Eigen::Index d = 0;
  double cum = 0.0;
  for (Eigen::Index rank = 0; rank < positive_count; ++rank) {
    cum += sb_eig.eigenvalues()(order[static_cast<size_t>(rank)]);
    ++d;
    if (cum >= target) break;
  }
  d = std::min(d, max_dim);
  d = std::max<Eigen::Index>(d, 1);

  PencilSolution out;
  out.ridge = ridge_value;
  out.directions.resize(whitener.rows(), d);
  out.eigenvalues.resize(d);
  for (Eigen::Index j = 0; j < d; ++j) {
    const Eigen::Index src = order[static_cast<size_t>(j)];
    out.eigenvalues(j) = sb_eig.eigenvalues()(src);
    out.directions.col(j) = whitener * sb_eig.eigenvectors().col(src);
  }
  return out;
}

/// Flips each column so its largest-magnitude entry is positive, making the
/// direction signs reproducible across solver builds.
void canonicalize_signs(Eigen::MatrixXd& W) {
  for (Eigen::Index j = 0; j < W.cols(); ++j) {
    Eigen::Index at = 0;
    W.col(j).cwiseAbs().maxCoeff(&at);
    if (W(at, j) < 0.0) W.col(j) = -W.col(j);
  }
}

Eigen::Index rank_cap(Eigen::Index classes) {
  return std::max<Eigen::Index>(classes - 1, 1);
}

}  // namespace

ScatterSet scatter_matrices(const Eigen::MatrixXd& X, const Eigen::MatrixXd& P) {
  validate_weights(X, P);

  const Eigen::VectorXd mass = P.colwise().sum();  // per-instance weight
  const double n = mass.sum();
  if (!(n > 0.0)) throw NumericError("degenerate weights: total weight mass is zero");

  const Eigen::MatrixXd scaled = normalize_rows(P);

  // S_w, S_b, S_t only need the D x C class sums, the D-vector of weighted
  // feature totals, and the mass-weighted second moment; the N x N forms are
  // never materialized.
  const Eigen::MatrixXd class_sums = X * scaled.transpose();          // D x C
  const Eigen::VectorXd weighted_total = X * mass;                    // D
  const Eigen::MatrixXd Xw = X.array().rowwise() * mass.transpose().array().sqrt();
  const Eigen::MatrixXd second_moment = Xw * Xw.transpose();          // D x D

  ScatterSet out;
  out.n = n;
  out.classes = P.rows();
  const Eigen::MatrixXd between = class_sums * class_sums.transpose();
  const Eigen::MatrixXd grand = (weighted_total * weighted_total.transpose()) / n;
  out.Sw = symmetrized(second_moment - between);
  out.Sb = symmetrized(between - grand);
  out.St = symmetrized(second_moment - grand);
  return out;
}

Projection fit_projection(const ScatterSet& scatter, ScatterPair pair, double energy,
                          std::optional<double> ridge) {
  const Eigen::MatrixXd& Spair = pair == ScatterPair::b_over_t ? scatter.St : scatter.Sw;
  PencilSolution sol = solve_pencil(scatter.Sb, Spair, energy, ridge, scatter.Sb.rows(),
                                    rank_cap(scatter.classes));
  Projection out;
  out.W = std::move(sol.directions);
  canonicalize_signs(out.W);
  out.eigenvalues = std::move(sol.eigenvalues);
  out.energy_threshold = energy;
  out.ridge = sol.ridge;
  return out;
}

Projection fit_projection_from_data(const Eigen::MatrixXd& X, const Eigen::MatrixXd& P,
                                    ScatterPair pair, double energy,
                                    std::optional<double> ridge) {
  const Eigen::Index d_features = X.rows();
  const Eigen::Index n = X.cols();
  if (d_features <= n) return fit_projection(scatter_matrices(X, P), pair, energy, ridge);

  validate_weights(X, P);
  const Eigen::VectorXd mass = P.colwise().sum();
  const double total_mass = mass.sum();
  if (!(total_mass > 0.0)) throw NumericError("degenerate weights: total weight mass is zero");

  // High-dimensional case: every discriminant direction with a non-zero
  // eigenvalue lies in the span of the instances, so work in an orthonormal
  // basis of that span built from the Gram matrix.
  const Eigen::MatrixXd gram = symmetrized(X.transpose() * X);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> gram_eig(gram);
  if (gram_eig.info() != Eigen::Success)
    throw NumericError("eigendecomposition of the Gram matrix failed");

  const double drop = 1e-12 * gram.trace();
  std::vector<Eigen::Index> kept;
  for (Eigen::Index i = 0; i < n; ++i)
    if (gram_eig.eigenvalues()(i) > drop) kept.push_back(i);
  if (kept.empty())
    throw NumericError("degenerate projection: all feature columns are zero");

  const auto r = static_cast<Eigen::Index>(kept.size());
  Eigen::MatrixXd span(n, r);       // eigenvector block E
  Eigen::VectorXd roots(r);         // sqrt of Gram eigenvalues
  for (Eigen::Index j = 0; j < r; ++j) {
    span.col(j) = gram_eig.eigenvectors().col(kept[static_cast<size_t>(j)]);
    roots(j) = std::sqrt(gram_eig.eigenvalues()(kept[static_cast<size_t>(j)]));
  }

  // Project the scatter forms into the basis: with U = X E Gamma^{-1/2},
  // U^T (X A X^T) U = Gamma^{1/2} E^T A E Gamma^{1/2}.
  const Eigen::MatrixXd scaled = normalize_rows(P);
  const Eigen::MatrixXd class_sums = scaled * span;  // C x r
  const Eigen::VectorXd weighted_total = span.transpose() * mass;
  const Eigen::MatrixXd mass_inner =
      (span.array().colwise() * mass.array()).matrix().transpose() * span;

  auto lift = [&](const Eigen::MatrixXd& inner) {
    return symmetrized((roots.asDiagonal() * inner) * roots.asDiagonal());
  };
  const Eigen::MatrixXd between = lift(class_sums.transpose() * class_sums);
  const Eigen::MatrixXd grand =
      lift((weighted_total * weighted_total.transpose()) / total_mass);
  const Eigen::MatrixXd second = lift(mass_inner);

  const Eigen::MatrixXd Sb_r = symmetrized(between - grand);
  const Eigen::MatrixXd Spair_r = pair == ScatterPair::b_over_t
                                      ? symmetrized(second - grand)
                                      : symmetrized(second - between);

  // The ambient dimension for the default ridge is the feature count, so the
  // basis change does not alter the effective regularization.
  PencilSolution sol =
      solve_pencil(Sb_r, Spair_r, energy, ridge, d_features, rank_cap(P.rows()));

  Eigen::MatrixXd basis = X * (span * roots.cwiseInverse().asDiagonal());  // D x r
  Projection out;
  out.W = basis * sol.directions;
  canonicalize_signs(out.W);
  out.eigenvalues = std::move(sol.eigenvalues);
  out.energy_threshold = energy;
  out.ridge = sol.ridge;
  return out;
}

Eigen::MatrixXd transform(const Projection& proj, const Eigen::MatrixXd& X) {
  if (X.rows() != proj.W.rows())
    throw DataError("dimension error: projection expects " + std::to_string(proj.W.rows()) +
                    " features, X has " + std::to_string(X.rows()));
  return proj.W.transpose() * X;
}

}  // namespace swmlda
