#pragma once

#include "swmlda/mlknn.hpp"

#include <Eigen/Core>

namespace swmlda {

/// The five evaluation measures plus how many test instances each ranking
/// measure had to skip: instances without positive labels cannot be ranked
/// at all, and instances with every label positive have no relevant /
/// irrelevant pairs for the ranking loss.
struct MetricsReport {
  double one_error = 0.0;
  double coverage = 0.0;
  double ranking_loss = 0.0;
  double hamming_loss = 0.0;
  double macro_f1 = 0.0;
  Eigen::Index skipped_one_error = 0;
  Eigen::Index skipped_coverage = 0;
  Eigen::Index skipped_ranking_loss = 0;
};

/// Fraction of instances whose highest-probability class is not a true
/// label.  Argmax ties go to the lowest class index.
double one_error(const Eigen::MatrixXd& Y, const Eigen::MatrixXd& probs,
                 Eigen::Index* skipped = nullptr);

/// Mean over instances of (worst rank of any true label - 1) / (C - 1),
/// ranking classes by descending probability with index tie-breaks.
double coverage(const Eigen::MatrixXd& Y, const Eigen::MatrixXd& probs,
                Eigen::Index* skipped = nullptr);

/// Mean fraction of (relevant, irrelevant) class pairs ranked in the wrong
/// order; probability ties count as violations.
double ranking_loss(const Eigen::MatrixXd& Y, const Eigen::MatrixXd& probs,
                    Eigen::Index* skipped = nullptr);

/// Mean per-instance fraction of label decisions that disagree with truth.
double hamming_loss(const Eigen::MatrixXd& Y, const Eigen::MatrixXd& labels);

/// (2/C) * sum over classes of precision*recall / (precision+recall), with
/// empty ratios treated as zero.
double macro_f1(const Eigen::MatrixXd& Y, const Eigen::MatrixXd& labels);

/// All five measures of a prediction set against ground truth.
MetricsReport evaluate(const Eigen::MatrixXd& Y, const PredictionSet& predictions);

}  // namespace swmlda
