#pragma once

#include <Eigen/Core>

#include <string>
#include <vector>

namespace swmlda {

/// Per-class instance weights assembled into a C x N matrix.  Column i holds
/// the weight each class assigns to instance i; entries are zero wherever the
/// instance does not carry the class label.  Saliency-based weights have rows
/// summing to one; baseline weighting schemes may not.
struct WeightMatrix {
  Eigen::MatrixXd P;                          // C x N, non-negative
  Eigen::VectorXd row_sums;                   // length C
  Eigen::VectorXd col_sums;                   // length N, total weight per instance
  Eigen::VectorXd residuals;                  // length C, per-class solve residuals
  std::vector<Eigen::Index> empty_classes;    // classes with no labelled instances
  std::vector<std::string> warnings;          // e.g. solver convergence notes

  Eigen::Index n_classes() const { return P.rows(); }
  Eigen::Index n_instances() const { return P.cols(); }
};

}  // namespace swmlda
