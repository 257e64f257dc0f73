#include "swmlda/metrics.hpp"

#include "swmlda/errors.hpp"

#include <string>

namespace swmlda {

namespace {

void check_shapes(const Eigen::MatrixXd& Y, const Eigen::MatrixXd& other, const char* what) {
  if (Y.rows() != other.rows() || Y.cols() != other.cols())
    throw DataError(std::string("dimension error: ground truth is ") + std::to_string(Y.rows()) +
                    "x" + std::to_string(Y.cols()) + " but " + what + " is " +
                    std::to_string(other.rows()) + "x" + std::to_string(other.cols()));
  if (Y.cols() == 0) throw DataError("undefined metric: no instances to evaluate");
}

Eigen::Index positives_of(const Eigen::MatrixXd& Y, Eigen::Index i) {
  Eigen::Index m = 0;
  for (Eigen::Index c = 0; c < Y.rows(); ++c)
    if (Y(c, i) > 0.5) ++m;
  return m;
}

}  // namespace

double one_error(const Eigen::MatrixXd& Y, const Eigen::MatrixXd& probs,
                 Eigen::Index* skipped) {
  check_shapes(Y, probs, "probability matrix");
  Eigen::Index evaluated = 0;
  Eigen::Index skips = 0;
  double errors = 0.0;
  for (Eigen::Index i = 0; i < Y.cols(); ++i) {
    if (positives_of(Y, i) == 0) {
      ++skips;
      continue;
    }
    Eigen::Index top = 0;
    for (Eigen::Index c = 1; c < Y.rows(); ++c)
      if (probs(c, i) > probs(top, i)) top = c;
    if (Y(top, i) <= 0.5) errors += 1.0;
    ++evaluated;
  }
  if (skipped) *skipped = skips;
  if (evaluated == 0)
    throw DataError("undefined metric: no instance has a positive label");
  return errors / static_cast<double>(evaluated);
}

double coverage(const Eigen::MatrixXd& Y, const Eigen::MatrixXd& probs,
                Eigen::Index* skipped) {
  check_shapes(Y, probs, "probability matrix");
  const Eigen::Index n_classes = Y.rows();
  if (n_classes < 2)
    throw DataError("undefined metric: coverage needs at least two classes");

  Eigen::Index evaluated = 0;
  Eigen::Index skips = 0;
  double total = 0.0;
  for (Eigen::Index i = 0; i < Y.cols(); ++i) {
    if (positives_of(Y, i) == 0) {
      ++skips;
      continue;
    }
    // Rank of class c (1-based): classes with higher probability, plus
    // equal-probability classes of lower index, come first.
    Eigen::Index worst = 0;
    for (Eigen::Index c = 0; c < n_classes; ++c) {
      if (Y(c, i) <= 0.5) continue;
      Eigen::Index rank = 1;
      for (Eigen::Index l = 0; l < n_classes; ++l) {
        if (l == c) continue;
        if (probs(l, i) > probs(c, i) || (probs(l, i) == probs(c, i) && l < c)) ++rank;
      }
      worst = std::max(worst, rank);
    }
    total += static_cast<double>(worst - 1) / static_cast<double>(n_classes - 1);
    ++evaluated;
  }
  if (skipped) *skipped = skips;
  if (evaluated == 0)
    throw DataError("undefined metric: no instance has a positive label");
  return total / static_cast<double>(evaluated);
}

double ranking_loss(const Eigen::MatrixXd& Y, const Eigen::MatrixXd& probs,
                    Eigen::Index* skipped) {
  check_shapes(Y, probs, "probability matrix");
  Eigen::Index evaluated = 0;
  Eigen::Index skips = 0;
  double total = 0.0;
  for (Eigen::Index i = 0; i < Y.cols(); ++i) {
    const Eigen::Index m = positives_of(Y, i);
    const Eigen::Index n = Y.rows() - m;
    if (m == 0 || n == 0) {
      ++skips;
      continue;
    }
    Eigen::Index violations = 0;
    for (Eigen::Index rel = 0; rel < Y.rows(); ++rel) {
      if (Y(rel, i) <= 0.5) continue;
      for (Eigen::Index irr = 0; irr < Y.rows(); ++irr) {
        if (Y(irr, i) > 0.5) continue;
        if (probs(rel, i) <= probs(irr, i)) ++violations;
      }
    }
    total += static_cast<double>(violations) / static_cast<double>(m * n);
    ++evaluated;
  }
  if (skipped) *skipped = skips;
  if (evaluated == 0)
    throw DataError("undefined metric: no instance has both a positive and a negative label");
  return total / static_cast<double>(evaluated);
}

double hamming_loss(const Eigen::MatrixXd& Y, const Eigen::MatrixXd& labels) {
  check_shapes(Y, labels, "label matrix");
  double total = 0.0;
  for (Eigen::Index i = 0; i < Y.cols(); ++i) {
    Eigen::Index flips = 0;
    for (Eigen::Index c = 0; c < Y.rows(); ++c)
      if ((Y(c, i) > 0.5) != (labels(c, i) > 0.5)) ++flips;
    total += static_cast<double>(flips) / static_cast<double>(Y.rows());
  }
  return total / static_cast<double>(Y.cols());
}

double macro_f1(const Eigen::MatrixXd& Y, const Eigen::MatrixXd& labels) {
  check_shapes(Y, labels, "label matrix");
  double sum = 0.0;
  for (Eigen::Index c = 0; c < Y.rows(); ++c) {
    Eigen::Index tp = 0, fp = 0, fn = 0;
    for (Eigen::Index i = 0; i < Y.cols(); ++i) {
      const bool truth = Y(c, i) > 0.5;
      const bool pred = labels(c, i) > 0.5;
      if (truth && pred) ++tp;
      else if (!truth && pred) ++fp;
      else if (truth && !pred) ++fn;
    }
    const double precision = tp + fp > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
    const double recall = tp + fn > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
    if (precision + recall > 0.0) sum += precision * recall / (precision + recall);
  }
  return 2.0 * sum / static_cast<double>(Y.rows());
}

MetricsReport evaluate(const Eigen::MatrixXd& Y, const PredictionSet& predictions) {
  MetricsReport report;
  report.one_error = one_error(Y, predictions.probs, &report.skipped_one_error);
  report.coverage = coverage(Y, predictions.probs, &report.skipped_coverage);
  report.ranking_loss = ranking_loss(Y, predictions.probs, &report.skipped_ranking_loss);
  report.hamming_loss = hamming_loss(Y, predictions.labels);
  report.macro_f1 = macro_f1(Y, predictions.labels);
  return report;
}

}  // namespace swmlda
