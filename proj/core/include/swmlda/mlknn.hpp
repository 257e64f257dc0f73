#pragma once

#include <Eigen/Core>

namespace swmlda {

/// Bayesian multi-label k-nearest-neighbor model fitted in the projected
/// space.  For each class it keeps the smoothed prior of the label and the
/// smoothed conditional distribution of "j of my k neighbors carry the
/// label", for j = 0..k, separately for positive and negative instances.
struct MlknnModel {
  Eigen::MatrixXd Z_train;    // d x N projected training instances
  Eigen::MatrixXd Y_train;    // C x N binary labels
  int k = 15;
  double smoothing = 1.0;
  Eigen::VectorXd prior;      // length C, P(label present)
  Eigen::VectorXd prior_neg;  // length C, complement
  Eigen::MatrixXd cond;       // C x (k+1), P(count = j | label present)
  Eigen::MatrixXd cond_neg;   // C x (k+1), P(count = j | label absent)
};

/// Per-instance label probabilities and thresholded decisions.
struct PredictionSet {
  Eigen::MatrixXd probs;   // C x M, entries in [0, 1]
  Eigen::MatrixXd labels;  // C x M binary, labels = (probs >= threshold)
  double threshold = 0.5;
};

/// Counts neighbor labels over the training set itself (each instance
/// excluded from its own neighborhood) and turns the counts into smoothed
/// priors and conditionals.  Neighbors are the k nearest by Euclidean
/// distance, ties broken toward the lower training index.
MlknnModel mlknn_fit(const Eigen::MatrixXd& Z_train, const Eigen::MatrixXd& Y_train, int k,
                     double smoothing);

/// Applies the Bayes rule per class to the neighbor label counts of each
/// test instance.
PredictionSet mlknn_predict(const MlknnModel& model, const Eigen::MatrixXd& Z_test,
                            double threshold);

}  // namespace swmlda
