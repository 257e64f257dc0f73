#include "swmlda/errors.hpp"
#include "swmlda/metrics.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace swmlda;

namespace {

Eigen::MatrixXd col3(double a, double b, double c) {
  Eigen::MatrixXd m(3, 1);
  m << a, b, c;
  return m;
}

}  // namespace

TEST_SUITE_BEGIN("metrics");

TEST_CASE("one-error hand values") {
  Eigen::MatrixXd probs(2, 2);
  probs << 0.9, 0.9,
      0.1, 0.1;
  Eigen::MatrixXd Y(2, 2);
  Y << 1, 0,
      0, 1;
  // First instance's top class is correct, second's is not.
  CHECK(one_error(Y, probs) == doctest::Approx(0.5));
}

TEST_CASE("one-error argmax ties go to the lowest class index") {
  Eigen::MatrixXd probs = Eigen::MatrixXd::Constant(2, 1, 0.5);
  Eigen::MatrixXd top(2, 1);
  top << 1, 0;
  CHECK(one_error(top, probs) == 0.0);
  Eigen::MatrixXd bottom(2, 1);
  bottom << 0, 1;
  CHECK(one_error(bottom, probs) == 1.0);
}

TEST_CASE("coverage hand trace") {
  // Ranking (0, 1, 2); positives at ranks 1 and 3 -> (3 - 1) / (3 - 1) = 1.
  CHECK(coverage(col3(1, 0, 1), col3(0.5, 0.3, 0.2)) == doctest::Approx(1.0));
  // A single top-ranked positive covers immediately.
  CHECK(coverage(col3(1, 0, 0), col3(0.5, 0.3, 0.2)) == doctest::Approx(0.0));
  // All labels positive forces the full depth.
  CHECK(coverage(col3(1, 1, 1), col3(0.5, 0.3, 0.2)) == doctest::Approx(1.0));
}

TEST_CASE("coverage needs at least two classes") {
  CHECK_THROWS_AS(coverage(Eigen::MatrixXd::Ones(1, 2), Eigen::MatrixXd::Constant(1, 2, 0.7)),
                  DataError);
}

TEST_CASE("ranking loss hand trace") {
  // Pairs: (class0, class1) ordered correctly, (class2, class1) violated.
  CHECK(ranking_loss(col3(1, 0, 1), col3(0.5, 0.3, 0.2)) == doctest::Approx(0.5));
  // Perfect separation.
  CHECK(ranking_loss(col3(1, 1, 0), col3(0.8, 0.7, 0.1)) == doctest::Approx(0.0));
  // Everything tied counts every pair as a violation.
  CHECK(ranking_loss(col3(1, 0, 1), col3(0.4, 0.4, 0.4)) == doctest::Approx(1.0));
}

TEST_CASE("hamming loss hand values") {
  Eigen::MatrixXd Y = col3(1, 0, 1);
  CHECK(hamming_loss(Y, col3(1, 1, 1)) == doctest::Approx(1.0 / 3.0));
  CHECK(hamming_loss(Y, Y) == 0.0);
  CHECK(hamming_loss(Y, col3(0, 1, 0)) == doctest::Approx(1.0));
}

TEST_CASE("macro F1 hand values") {
  // C = 1 with TP=1, FP=1, FN=0: precision 1/2, recall 1 -> F1 = 2/3.
  Eigen::MatrixXd Y(1, 2);
  Y << 1, 0;
  Eigen::MatrixXd pred(1, 2);
  pred << 1, 1;
  CHECK(macro_f1(Y, pred) == doctest::Approx(2.0 / 3.0));

  Eigen::MatrixXd truth(2, 3);
  truth << 1, 0, 1,
      0, 1, 1;
  CHECK(macro_f1(truth, truth) == doctest::Approx(1.0));
  CHECK(macro_f1(truth, Eigen::MatrixXd::Zero(2, 3)) == 0.0);
}

TEST_CASE("skip rules for degenerate instances") {
  // Instance 0 is normal, instance 1 has no positives, instance 2 has all.
  Eigen::MatrixXd Y(2, 3);
  Y << 1, 0, 1,
      0, 0, 1;
  Eigen::MatrixXd probs(2, 3);
  probs << 0.9, 0.9, 0.9,
      0.1, 0.1, 0.1;

  Eigen::Index skipped = 0;
  CHECK(one_error(Y, probs, &skipped) == doctest::Approx(0.0));
  CHECK(skipped == 1);
  CHECK(coverage(Y, probs, &skipped) == doctest::Approx(0.5));  // ranks 1 and 2
  CHECK(skipped == 1);
  CHECK(ranking_loss(Y, probs, &skipped) == doctest::Approx(0.0));
  CHECK(skipped == 2);

  const double hamming_all = hamming_loss(Y, Eigen::MatrixXd::Zero(2, 3));
  CHECK(hamming_all == doctest::Approx(3.0 / 6.0));  // no skipping here
}

TEST_CASE("ranking metrics with zero evaluable instances are data errors") {
  const Eigen::MatrixXd none = Eigen::MatrixXd::Zero(2, 2);
  const Eigen::MatrixXd probs = Eigen::MatrixXd::Constant(2, 2, 0.5);
  CHECK_THROWS_AS(one_error(none, probs), DataError);
  CHECK_THROWS_AS(coverage(none, probs), DataError);
  CHECK_THROWS_AS(ranking_loss(none, probs), DataError);
  // All-positive everywhere starves only the ranking loss.
  const Eigen::MatrixXd full = Eigen::MatrixXd::Ones(2, 2);
  CHECK_THROWS_AS(ranking_loss(full, probs), DataError);
  CHECK(one_error(full, probs) == 0.0);
}

TEST_CASE("shape mismatches are data errors") {
  CHECK_THROWS_AS(one_error(Eigen::MatrixXd::Ones(2, 3), Eigen::MatrixXd::Ones(2, 4)),
                  DataError);
  CHECK_THROWS_AS(hamming_loss(Eigen::MatrixXd::Ones(2, 3), Eigen::MatrixXd::Ones(3, 3)),
                  DataError);
}

TEST_CASE("ranking metrics are invariant under monotone probability transforms") {
  std::mt19937 rng(31);
  std::uniform_real_distribution<double> unif(0.05, 0.95);
  std::bernoulli_distribution coin(0.4);
  Eigen::MatrixXd Y(4, 25);
  Eigen::MatrixXd probs(4, 25);
  for (Eigen::Index i = 0; i < 25; ++i) {
    Eigen::Index positives = 0;
    for (Eigen::Index c = 0; c < 4; ++c) {
      Y(c, i) = coin(rng) ? 1.0 : 0.0;
      positives += Y(c, i) > 0.5;
      probs(c, i) = unif(rng);
    }
    if (positives == 0) Y(static_cast<Eigen::Index>(i % 4), i) = 1.0;
  }
  const Eigen::MatrixXd squashed =
      probs.unaryExpr([](double p) { return 1.0 / (1.0 + std::exp(-7.0 * p)); });
  CHECK(one_error(Y, squashed) == one_error(Y, probs));
  CHECK(coverage(Y, squashed) == coverage(Y, probs));
  CHECK(ranking_loss(Y, squashed) == ranking_loss(Y, probs));
}

TEST_CASE("reversing tie-free probabilities complements the ranking loss") {
  std::mt19937 rng(37);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Eigen::MatrixXd Y(3, 20);
  Eigen::MatrixXd probs(3, 20);
  for (Eigen::Index i = 0; i < 20; ++i) {
    for (Eigen::Index c = 0; c < 3; ++c) {
      Y(c, i) = 0.0;
      probs(c, i) = unif(rng);
    }
    Y(static_cast<Eigen::Index>(i % 3), i) = 1.0;  // 1 or 2 positives below C
    if (i % 2 == 0) Y(static_cast<Eigen::Index>((i + 1) % 3), i) = 1.0;
  }
  const Eigen::MatrixXd reversed = Eigen::MatrixXd::Ones(3, 20) - probs;
  const double forward = ranking_loss(Y, probs);
  const double backward = ranking_loss(Y, reversed);
  CHECK(forward + backward == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("random probabilities on balanced two-class data rank at one half") {
  std::mt19937 rng(43);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const Eigen::Index n = 10000;
  Eigen::MatrixXd Y = Eigen::MatrixXd::Zero(2, n);
  Eigen::MatrixXd probs(2, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    Y(i % 2, i) = 1.0;
    probs(0, i) = unif(rng);
    probs(1, i) = unif(rng);
  }
  CHECK(ranking_loss(Y, probs) == doctest::Approx(0.5).epsilon(0.1));
  CHECK(std::abs(ranking_loss(Y, probs) - 0.5) < 0.05);
}

TEST_CASE("evaluate bundles consistent metrics and skip counts") {
  Eigen::MatrixXd Y(3, 4);
  Y << 1, 0, 1, 0,
      0, 1, 1, 0,
      0, 0, 1, 1;
  PredictionSet pred;
  pred.threshold = 0.5;
  pred.probs.resize(3, 4);
  pred.probs << 0.9, 0.2, 0.8, 0.1,
      0.3, 0.7, 0.9, 0.2,
      0.1, 0.1, 0.7, 0.8;
  pred.labels = (pred.probs.array() >= pred.threshold).cast<double>().matrix();

  const MetricsReport report = evaluate(Y, pred);
  CHECK(report.one_error == doctest::Approx(one_error(Y, pred.probs)));
  CHECK(report.coverage == doctest::Approx(coverage(Y, pred.probs)));
  CHECK(report.ranking_loss == doctest::Approx(ranking_loss(Y, pred.probs)));
  CHECK(report.hamming_loss == doctest::Approx(hamming_loss(Y, pred.labels)));
  CHECK(report.macro_f1 == doctest::Approx(macro_f1(Y, pred.labels)));
  CHECK(report.skipped_one_error == 0);
  CHECK(report.skipped_ranking_loss == 1);  // instance 2 has all labels positive

  // Ground truth evaluated against itself is perfect.
  PredictionSet self;
  self.threshold = 0.5;
  self.probs = (0.25 + 0.5 * Y.array()).matrix();
  self.labels = Y;
  const MetricsReport ideal = evaluate(Y, self);
  CHECK(ideal.one_error == 0.0);
  CHECK(ideal.hamming_loss == 0.0);
  CHECK(ideal.macro_f1 == doctest::Approx(1.0));
  CHECK(ideal.ranking_loss == 0.0);
}

TEST_SUITE_END();
