#pragma once

#include "swmlda/dataset.hpp"
#include "swmlda/priors.hpp"
#include "swmlda/weights.hpp"

#include <Eigen/Core>

#include <vector>

namespace swmlda {

/// Fully connected affinity graph over the members of one class, together
/// with the diagonal prior and regularizer that complete the saliency system
/// (degree - W + V + epsilon*I) p = 1.
struct ClassGraph {
  Eigen::Index class_index = -1;
  Eigen::MatrixXd W;       // N_c x N_c, symmetric, unit diagonal
  Eigen::VectorXd degree;  // row sums of W
  PriorDiagonal V;         // prior penalties aligned with graph node order
  double sigma = 1.0;
  double epsilon = 1e-6;
};

/// Heat-kernel affinity over member columns: W_ij = exp(-dist / (2 sigma^2)).
/// The distance is the plain Euclidean norm; pass squared = true for the
/// conventional squared-distance kernel.  The returned graph has a zero prior
/// which callers replace before solving.
ClassGraph build_affinity(const Eigen::MatrixXd& members, double sigma, bool squared = false);

/// Median over all pairwise member distances (squared if requested); zero
/// when there are fewer than two members.
double median_pairwise_distance(const Eigen::MatrixXd& members, bool squared = false);

/// Saliency weights for one class graph.
struct PseSolution {
  Eigen::VectorXd weights;    // length N_c, non-negative, sums to 1
  double residual_inf = 0.0;  // ||H p_unnormalized - 1||_inf of the linear solve
};

/// Solves (degree - W + V + epsilon*I) p = 1, clamps round-off negatives in
/// [-1e-10, 0) to zero, and normalizes p to unit sum.  A singleton graph
/// short-circuits to the exact weight (1).
PseSolution pse_solve(const ClassGraph& graph);

/// One class's solved weights ready for scattering into the weight matrix.
struct ClassWeights {
  Eigen::Index class_index = -1;
  std::vector<Eigen::Index> member_indices;
  Eigen::VectorXd weights;
};

/// Scatters per-class weight vectors into a C x N matrix: entry (c, i) gets
/// the weight of instance i in class c, zero elsewhere.  Classes absent from
/// per_class keep an all-zero row and are flagged as empty.
WeightMatrix assemble_weight_matrix(Eigen::Index n_classes, Eigen::Index n_instances,
                                    const std::vector<ClassWeights>& per_class);

struct SaliencyOptions {
  PriorForm form = PriorForm::binary;
  double sigma = 1.0;          // heat-kernel bandwidth
  bool sigma_median = false;   // per-class median pairwise distance instead
  bool affinity_squared = false;
  double epsilon = 1e-6;       // diagonal regularizer of the saliency system
  double binary_constant = 1.0;
  int fuzzy_max_iters = 100;
  double fuzzy_tol = 1e-6;
  int hsic_max_sweeps = 50;
};

/// The full per-class pipeline: prior, affinity graph, saliency solve, and
/// assembly into the weight matrix.  Deterministic given the options; empty
/// classes produce zero rows plus a warning instead of failing.
WeightMatrix saliency_weights(const MultiLabelDataset& ds, const SaliencyOptions& options);

}  // namespace swmlda
