#include "swmlda/saliency.hpp"

#include "swmlda/errors.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

namespace swmlda {

ClassGraph build_affinity(const Eigen::MatrixXd& members, double sigma, bool squared) {
  if (!(sigma > 0.0))
    throw ConfigError("affinity bandwidth sigma must be positive, got " + std::to_string(sigma));
  const Eigen::Index nc = members.cols();
  if (nc < 1) throw DataError("affinity graph needs at least one member");

  ClassGraph graph;
  graph.sigma = sigma;
  graph.W.resize(nc, nc);
  const double denom = 2.0 * sigma * sigma;
  for (Eigen::Index i = 0; i < nc; ++i) {
    graph.W(i, i) = 1.0;
    for (Eigen::Index j = i + 1; j < nc; ++j) {
      double dist = (members.col(i) - members.col(j)).squaredNorm();
      if (!squared) dist = std::sqrt(dist);
      const double w = std::exp(-dist / denom);
      graph.W(i, j) = w;
      graph.W(j, i) = w;
    }
  }
  graph.degree = graph.W.rowwise().sum();
  graph.V.values = Eigen::VectorXd::Zero(nc);
  return graph;
}

double median_pairwise_distance(const Eigen::MatrixXd& members, bool squared) {
  const Eigen::Index nc = members.cols();
  if (nc < 2) return 0.0;
  std::vector<double> dists;
  dists.reserve(static_cast<size_t>(nc * (nc - 1) / 2));
  for (Eigen::Index i = 0; i < nc; ++i) {
    for (Eigen::Index j = i + 1; j < nc; ++j) {
      double d = (members.col(i) - members.col(j)).squaredNorm();
      if (!squared) d = std::sqrt(d);
      dists.push_back(d);
    }
  }
  const size_t mid = dists.size() / 2;
  std::nth_element(dists.begin(), dists.begin() + static_cast<std::ptrdiff_t>(mid), dists.end());
  double median = dists[mid];
  if (dists.size() % 2 == 0) {
    const double below = *std::max_element(dists.begin(), dists.begin() + static_cast<std::ptrdiff_t>(mid));
    median = 0.5 * (median + below);
  }
  return median;
}

PseSolution pse_solve(const ClassGraph& graph) {
  const Eigen::Index nc = graph.W.rows();
  if (graph.W.cols() != nc)
    throw DataError("dimension error: affinity matrix must be square");
  if (graph.V.values.size() != nc)
    throw DataError("dimension error: prior has " + std::to_string(graph.V.values.size()) +
                    " entries for a graph of " + std::to_string(nc) + " members");
  if (!(graph.epsilon > 0.0))
    throw ConfigError("saliency regularizer epsilon must be positive, got " +
                      std::to_string(graph.epsilon));

  PseSolution out;
  if (nc == 1) {
    // A lone member carries the whole class regardless of its prior.
    out.weights = Eigen::VectorXd::Ones(1);
    out.residual_inf = 0.0;
    return out;
  }

  Eigen::MatrixXd H = -graph.W;
  H.diagonal() += graph.degree + graph.V.values;
  H.diagonal().array() += graph.epsilon;

  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(nc);
  Eigen::LLT<Eigen::MatrixXd> llt(H);
  if (llt.info() != Eigen::Success)
    throw NumericError("saliency system is not positive definite; try a larger epsilon");

  Eigen::VectorXd p = llt.solve(ones);
  // One step of iterative refinement keeps the residual small even when the
  // regularizer makes the system ill-conditioned.
  p += llt.solve(ones - H * p);

  const double h_norm = H.cwiseAbs().rowwise().sum().maxCoeff();
  out.residual_inf = (H * p - ones).cwiseAbs().maxCoeff();
  if (!(out.residual_inf <= 1e-8 * h_norm))
    throw NumericError("saliency solve residual " + std::to_string(out.residual_inf) +
                       " too large; try a larger epsilon");

  const double min_entry = p.minCoeff();
  if (min_entry < -1e-10)
    throw NumericError("saliency weights went negative (min entry " +
                       std::to_string(min_entry) + "); the prior is not a valid penalty");
  p = p.cwiseMax(0.0);

  const double total = p.sum();
  if (!(total > 0.0))
    throw NumericError("degenerate weights: saliency solution sums to zero");
  out.weights = p / total;
  return out;
}

WeightMatrix assemble_weight_matrix(Eigen::Index n_classes, Eigen::Index n_instances,
                                    const std::vector<ClassWeights>& per_class) {
  WeightMatrix out;
  out.P = Eigen::MatrixXd::Zero(n_classes, n_instances);
  std::vector<bool> filled(static_cast<size_t>(n_classes), false);

  for (const ClassWeights& cw : per_class) {
    if (cw.class_index < 0 || cw.class_index >= n_classes)
      throw std::logic_error("weight assembly: class index out of range");
    if (static_cast<Eigen::Index>(cw.member_indices.size()) != cw.weights.size())
      throw std::logic_error("weight assembly: member/weight length mismatch");
    for (size_t j = 0; j < cw.member_indices.size(); ++j) {
      const Eigen::Index i = cw.member_indices[j];
      if (i < 0 || i >= n_instances)
        throw std::logic_error("weight assembly: member index out of range");
      if (out.P(cw.class_index, i) != 0.0)
        throw std::logic_error("weight assembly: duplicate write to class " +
                               std::to_string(cw.class_index) + ", instance " +
                               std::to_string(i));
      out.P(cw.class_index, i) = cw.weights(static_cast<Eigen::Index>(j));
    }
    filled[static_cast<size_t>(cw.class_index)] = true;
  }

  for (Eigen::Index c = 0; c < n_classes; ++c)
    if (!filled[static_cast<size_t>(c)]) out.empty_classes.push_back(c);

  out.row_sums = out.P.rowwise().sum();
  out.col_sums = out.P.colwise().sum();
  out.residuals = Eigen::VectorXd::Zero(n_classes);
  return out;
}

WeightMatrix saliency_weights(const MultiLabelDataset& ds, const SaliencyOptions& options) {
  const Eigen::Index n_classes = ds.n_classes();
  std::vector<std::string> warnings;

  // The fuzzy and dependence priors come from one dataset-wide solve; the
  // other forms are cheap enough to evaluate per class.
  MembershipMatrix shared;
  bool have_shared = false;
  if (options.form == PriorForm::fuzzy) {
    shared = fuzzy_memberships(ds, options.fuzzy_max_iters, options.fuzzy_tol);
    have_shared = true;
    if (!shared.converged)
      warnings.push_back("fuzzy memberships did not converge within " +
                         std::to_string(options.fuzzy_max_iters) + " iterations");
  } else if (options.form == PriorForm::dependence) {
    shared = dependence_memberships(ds, options.hsic_max_sweeps);
    have_shared = true;
    if (!shared.converged)
      warnings.push_back("dependence assignment did not settle within " +
                         std::to_string(options.hsic_max_sweeps) + " sweeps");
  }

  const std::function<PriorDiagonal(Eigen::Index)> prior_for = [&](Eigen::Index c) {
    if (have_shared) return prior_from_memberships(ds, c, shared);
    switch (options.form) {
      case PriorForm::misclassification: return prior_misclassification(ds, c);
      case PriorForm::correlation: return prior_correlation(ds, c);
      case PriorForm::binary: return prior_binary(ds, c, options.binary_constant);
      case PriorForm::entropy: return prior_entropy(ds, c);
      default: throw std::logic_error("unhandled prior form");
    }
  };

  std::vector<ClassWeights> per_class;
  per_class.reserve(static_cast<size_t>(n_classes));
  Eigen::VectorXd residuals = Eigen::VectorXd::Zero(n_classes);
  for (Eigen::Index c = 0; c < n_classes; ++c) {
    const std::vector<Eigen::Index> members = ds.class_members(c);
    if (members.empty()) {
      warnings.push_back("class " + std::to_string(c) + " has no labelled instances; row is zero");
      continue;
    }

    Eigen::MatrixXd member_features(ds.n_features(), static_cast<Eigen::Index>(members.size()));
    for (size_t j = 0; j < members.size(); ++j)
      member_features.col(static_cast<Eigen::Index>(j)) = ds.X.col(members[j]);

    double sigma = options.sigma;
    if (options.sigma_median) {
      const double median = median_pairwise_distance(member_features, options.affinity_squared);
      if (median > 0.0) {
        sigma = median;
      } else {
        warnings.push_back("class " + std::to_string(c) +
                           ": median pairwise distance is degenerate; using configured sigma");
      }
    }

    ClassGraph graph = build_affinity(member_features, sigma, options.affinity_squared);
    graph.class_index = c;
    graph.V = prior_for(c);
    graph.epsilon = options.epsilon;

    const PseSolution solution = pse_solve(graph);
    residuals(c) = solution.residual_inf;

    ClassWeights cw;
    cw.class_index = c;
    cw.member_indices = members;
    cw.weights = solution.weights;
    per_class.push_back(std::move(cw));
  }

  WeightMatrix out = assemble_weight_matrix(n_classes, ds.n_instances(), per_class);
  out.residuals = std::move(residuals);
  out.warnings = std::move(warnings);
  return out;
}

}  // namespace swmlda
