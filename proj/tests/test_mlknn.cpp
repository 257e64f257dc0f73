#include "swmlda/errors.hpp"
#include "swmlda/mlknn.hpp"

#include <doctest.h>

#include <Eigen/QR>

#include <random>

#include "support/generators.hpp"

using namespace swmlda;

TEST_SUITE_BEGIN("mlknn");

TEST_CASE("smoothed prior hand value") {
  // N = 4, s = 1, two positives: prior = (1 + 2) / (2 + 4) = 0.5.
  Eigen::MatrixXd Z(1, 4);
  Z << 0, 1, 2, 3;
  Eigen::MatrixXd Y(1, 4);
  Y << 1, 1, 0, 0;
  const MlknnModel model = mlknn_fit(Z, Y, 2, 1.0);
  CHECK(model.prior(0) == doctest::Approx(0.5));
  CHECK(model.prior(0) + model.prior_neg(0) == doctest::Approx(1.0));
}

TEST_CASE("prior approaches one when every instance is positive and smoothing vanishes") {
  Eigen::MatrixXd Z(1, 5);
  Z << 0, 1, 2, 3, 4;
  const Eigen::MatrixXd Y = Eigen::MatrixXd::Ones(1, 5);
  const MlknnModel model = mlknn_fit(Z, Y, 2, 1e-9);
  CHECK(model.prior(0) == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("conditional rows are smoothed distributions") {
  const MultiLabelDataset ds = gen::random_dataset(3, 3, 25, 3, {.extra_label_prob = 0.3});
  const MlknnModel model = mlknn_fit(ds.X, ds.Y, 5, 1.0);
  REQUIRE(model.cond.cols() == 6);
  for (Eigen::Index c = 0; c < model.cond.rows(); ++c) {
    CHECK(model.cond.row(c).sum() == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(model.cond_neg.row(c).sum() == doctest::Approx(1.0).epsilon(1e-8));
    CHECK((model.cond.row(c).array() > 0.0).all());
    CHECK(model.prior(c) > 0.0);
    CHECK(model.prior(c) < 1.0);
  }
}

TEST_CASE("six-point hand trace through fit and predict") {
  // Two tight clusters on a line; with k = 2 every member of a cluster sees
  // only its own cluster.  All counting below is by hand.
  Eigen::MatrixXd Z(1, 6);
  Z << 0, 1, 2, 10, 11, 12;
  Eigen::MatrixXd Y(1, 6);
  Y << 1, 1, 1, 0, 0, 0;
  const MlknnModel model = mlknn_fit(Z, Y, 2, 1.0);

  CHECK(model.prior(0) == doctest::Approx(0.5));
  // Positive instances all count 2 positive neighbors: cond = (1, 1, 4)/6.
  CHECK(model.cond(0, 0) == doctest::Approx(1.0 / 6.0));
  CHECK(model.cond(0, 1) == doctest::Approx(1.0 / 6.0));
  CHECK(model.cond(0, 2) == doctest::Approx(4.0 / 6.0));
  // Negative instances all count zero: cond_neg = (4, 1, 1)/6.
  CHECK(model.cond_neg(0, 0) == doctest::Approx(4.0 / 6.0));
  CHECK(model.cond_neg(0, 2) == doctest::Approx(1.0 / 6.0));

  Eigen::MatrixXd probe(1, 2);
  probe << 1.5, 10.5;
  const PredictionSet pred = mlknn_predict(model, probe, 0.5);
  // Probe 1: both neighbors positive, Bayes gives (0.5 * 4/6) / (0.5 * 5/6).
  CHECK(pred.probs(0, 0) == doctest::Approx(0.8));
  CHECK(pred.labels(0, 0) == 1.0);
  // Probe 2: zero positive neighbors, the mirror-image posterior.
  CHECK(pred.probs(0, 1) == doctest::Approx(0.2));
  CHECK(pred.labels(0, 1) == 0.0);
}

TEST_CASE("an instance is never its own neighbor during fitting") {
  // Two coincident points with opposite labels: each must see the other.
  Eigen::MatrixXd Z(1, 2);
  Z << 0, 0;
  Eigen::MatrixXd Y(1, 2);
  Y << 1, 0;
  const MlknnModel model = mlknn_fit(Z, Y, 1, 1.0);
  // The positive instance counts 0 positive neighbors: cond = (2, 1)/3.
  CHECK(model.cond(0, 0) == doctest::Approx(2.0 / 3.0));
  CHECK(model.cond(0, 1) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("distance ties resolve toward the lower training index") {
  // The middle instance is equidistant from both ends; with k = 1 it must
  // pick index 0, whose label is positive.
  Eigen::MatrixXd Z(1, 3);
  Z << 0, 1, 2;
  Eigen::MatrixXd Y(1, 3);
  Y << 1, 0, 0;
  const MlknnModel model = mlknn_fit(Z, Y, 1, 1.0);
  // Negatives: instance 1 counts 1 (tie resolved to index 0), instance 2
  // counts 0 -> cond_neg = (2, 2)/4.  A high-index tie would give (3, 1)/4.
  CHECK(model.cond_neg(0, 0) == doctest::Approx(0.5));
  CHECK(model.cond_neg(0, 1) == doctest::Approx(0.5));
}

TEST_CASE("prediction probabilities are valid and consistent with labels") {
  const MultiLabelDataset train = gen::random_dataset(11, 3, 40, 3, {.extra_label_prob = 0.3});
  const MultiLabelDataset test = gen::random_dataset(12, 3, 15, 3, {.extra_label_prob = 0.3});
  const MlknnModel model = mlknn_fit(train.X, train.Y, 5, 1.0);
  for (const double threshold : {0.25, 0.5, 0.9}) {
    const PredictionSet pred = mlknn_predict(model, test.X, threshold);
    CHECK(pred.threshold == threshold);
    for (Eigen::Index c = 0; c < pred.probs.rows(); ++c)
      for (Eigen::Index i = 0; i < pred.probs.cols(); ++i) {
        CHECK(pred.probs(c, i) >= 0.0);
        CHECK(pred.probs(c, i) <= 1.0);
        CHECK(pred.labels(c, i) == (pred.probs(c, i) >= threshold ? 1.0 : 0.0));
      }
  }
}

TEST_CASE("predictions are invariant under a rotation of the projected space") {
  const MultiLabelDataset train = gen::random_dataset(21, 3, 30, 2, {.extra_label_prob = 0.2});
  const MultiLabelDataset test = gen::random_dataset(22, 3, 10, 2, {.extra_label_prob = 0.2});

  std::mt19937 rng(5);
  std::normal_distribution<double> gauss;
  Eigen::MatrixXd R(3, 3);
  for (Eigen::Index i = 0; i < 3; ++i)
    for (Eigen::Index j = 0; j < 3; ++j) R(i, j) = gauss(rng);
  const Eigen::MatrixXd Q = Eigen::HouseholderQR<Eigen::MatrixXd>(R).householderQ();

  const MlknnModel plain = mlknn_fit(train.X, train.Y, 4, 1.0);
  const MlknnModel rotated = mlknn_fit(Q * train.X, train.Y, 4, 1.0);
  const PredictionSet a = mlknn_predict(plain, test.X, 0.5);
  const PredictionSet b = mlknn_predict(rotated, Q * test.X, 0.5);
  for (Eigen::Index c = 0; c < a.probs.rows(); ++c)
    for (Eigen::Index i = 0; i < a.probs.cols(); ++i)
      CHECK(a.probs(c, i) == doctest::Approx(b.probs(c, i)).epsilon(1e-9));
}

TEST_CASE("fit and predict validate their inputs") {
  Eigen::MatrixXd Z(1, 4);
  Z << 0, 1, 2, 3;
  Eigen::MatrixXd Y(1, 4);
  Y << 1, 0, 1, 0;
  CHECK_THROWS_AS(mlknn_fit(Z, Y, 0, 1.0), ConfigError);
  CHECK_THROWS_AS(mlknn_fit(Z, Y, 4, 1.0), ConfigError);
  CHECK_THROWS_AS(mlknn_fit(Z, Y, 2, 0.0), ConfigError);
  CHECK_THROWS_AS(mlknn_fit(Z, Eigen::MatrixXd::Ones(1, 3), 2, 1.0), DataError);

  const MlknnModel model = mlknn_fit(Z, Y, 2, 1.0);
  CHECK_THROWS_AS(mlknn_predict(model, Eigen::MatrixXd::Random(2, 3), 0.5), DataError);
}

TEST_SUITE_END();
