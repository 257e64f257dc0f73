#pragma once

#include "swmlda/dataset.hpp"
#include "swmlda/weights.hpp"

#include <Eigen/Core>

#include <string>
#include <vector>

namespace swmlda {

/// The six per-instance prior forms.  Each one scores how strongly the
/// instances labelled with a class belong to it; the per-class saliency
/// solver turns those scores into graph anchors.
enum class PriorForm {
  misclassification,  // m: distance ratio to own vs. nearest rival class mean
  correlation,        // c: label-correlation share of the class
  binary,             // b: constant anchor strength
  entropy,            // e: label-set size penalty
  fuzzy,              // f: supervised fuzzy c-means memberships
  dependence,         // d: feature/label dependence-maximizing assignment
};

/// Parses the one-letter form codes m, c, b, e, f, d.
PriorForm prior_form_from_code(const std::string& code);
std::string prior_form_code(PriorForm form);

/// Diagonal prior restricted to one class: values[j] is the prior penalty of
/// the j-th member instance (larger means less typical of the class).
struct PriorDiagonal {
  Eigen::Index class_index = 0;
  std::vector<Eigen::Index> member_indices;  // columns of the dataset, ascending
  Eigen::VectorXd values;                    // same length, non-negative
  bool converged = true;                     // false only for iterative forms
};

/// Cosine similarity between label indicator rows; diagonal is one, entries
/// of classes that never occur are zero off the diagonal.
struct CorrelationMatrix {
  Eigen::MatrixXd R;  // C x C, symmetric, entries in [0, 1]
};

CorrelationMatrix correlation_matrix(const Eigen::MatrixXd& Y);

/// Per-instance class shares v_i = R y_i / |y_i|_1, one column per instance.
/// Columns of unlabelled instances are zero.
Eigen::MatrixXd correlation_shares(const Eigen::MatrixXd& Y, const CorrelationMatrix& R);

/// Soft memberships of every instance in every class, produced by one of the
/// two iterative solvers below.  Rows sum to one over the positive labels of
/// the instance; rows of unlabelled instances are zero.
struct MembershipMatrix {
  Eigen::MatrixXd w;  // N x C
  bool converged = true;
};

/// Supervised fuzzy c-means restricted to each instance's label set:
/// alternates weighted centroids and inverse-squared-distance memberships
/// until the largest membership change drops below tol.
MembershipMatrix fuzzy_memberships(const MultiLabelDataset& ds, int max_iters, double tol);

/// One membership update given fixed centroids (columns of centres).  Exposed
/// separately so the update rule can be checked against hand-derived values.
Eigen::MatrixXd fuzzy_membership_update(const MultiLabelDataset& ds,
                                        const Eigen::MatrixXd& centres);

/// Weighted centroid update given fixed memberships.
Eigen::MatrixXd fuzzy_centroid_update(const MultiLabelDataset& ds, const Eigen::MatrixXd& w);

/// Assigns each multi-labelled instance to exactly one of its classes to
/// maximize the feature/label dependence objective trace(K H L H).  Small
/// assignment spaces are searched exhaustively for the exact maximizer;
/// larger ones run coordinate ascent over instances until a full sweep
/// changes nothing.  The result is one-hot on each labelled instance's
/// support either way.
MembershipMatrix dependence_memberships(const MultiLabelDataset& ds, int max_sweeps);

/// Restricts a membership matrix to the members of class c, turning the
/// membership share w_ic into the prior penalty 1 - w_ic.
PriorDiagonal prior_from_memberships(const MultiLabelDataset& ds, Eigen::Index c,
                                     const MembershipMatrix& memberships);

/// The individual prior forms.  All of them require class c to be non-empty.
PriorDiagonal prior_misclassification(const MultiLabelDataset& ds, Eigen::Index c);
PriorDiagonal prior_correlation(const MultiLabelDataset& ds, Eigen::Index c);
PriorDiagonal prior_binary(const MultiLabelDataset& ds, Eigen::Index c, double constant);
PriorDiagonal prior_entropy(const MultiLabelDataset& ds, Eigen::Index c);
PriorDiagonal prior_fuzzy(const MultiLabelDataset& ds, Eigen::Index c, int max_iters, double tol);
PriorDiagonal prior_dependence(const MultiLabelDataset& ds, Eigen::Index c, int max_sweeps);

/// Weighting schemes that skip the saliency graph entirely and use the prior
/// memberships themselves as instance weights.  The misclassification form
/// has no membership interpretation, so it has no baseline counterpart.
enum class BaselineForm { binary, correlation, entropy, fuzzy, dependence };

BaselineForm baseline_form_from_code(const std::string& code);
std::string baseline_form_code(BaselineForm form);

struct BaselineOptions {
  int fuzzy_max_iters = 100;
  double fuzzy_tol = 1e-6;
  int hsic_max_sweeps = 50;
};

/// Builds the C x N weight matrix for a baseline scheme: binary uses the
/// label indicators unchanged, the others spread each instance's unit mass
/// over its positive labels according to the corresponding membership rule.
WeightMatrix baseline_weight_matrix(const MultiLabelDataset& ds, BaselineForm form,
                                    const BaselineOptions& options = {});

}  // namespace swmlda
