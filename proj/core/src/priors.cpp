#include "swmlda/priors.hpp"

#include "swmlda/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace swmlda {

namespace {

constexpr double kDegenerateDistance = 1e-12;

void require_nonempty(const MultiLabelDataset& ds, Eigen::Index c,
                      const std::vector<Eigen::Index>& members) {
  if (members.empty())
    throw DataError("empty class: class " + std::to_string(c) + " of " +
                    std::to_string(ds.n_classes()) + " has no labelled instances");
}

Eigen::VectorXd label_counts(const Eigen::MatrixXd& Y) {
  return Y.colwise().sum();  // |y_i|_1 per instance
}

}  // namespace

PriorForm prior_form_from_code(const std::string& code) {
  if (code == "m") return PriorForm::misclassification;
  if (code == "c") return PriorForm::correlation;
  if (code == "b") return PriorForm::binary;
  if (code == "e") return PriorForm::entropy;
  if (code == "f") return PriorForm::fuzzy;
  if (code == "d") return PriorForm::dependence;
  throw ConfigError("unknown prior form '" + code + "' (expected one of m, c, b, e, f, d)");
}

std::string prior_form_code(PriorForm form) {
  switch (form) {
    case PriorForm::misclassification: return "m";
    case PriorForm::correlation: return "c";
    case PriorForm::binary: return "b";
    case PriorForm::entropy: return "e";
    case PriorForm::fuzzy: return "f";
    case PriorForm::dependence: return "d";
  }
  throw ConfigError("invalid prior form value");
}

BaselineForm baseline_form_from_code(const std::string& code) {
  if (code == "b") return BaselineForm::binary;
  if (code == "c") return BaselineForm::correlation;
  if (code == "e") return BaselineForm::entropy;
  if (code == "f") return BaselineForm::fuzzy;
  if (code == "d") return BaselineForm::dependence;
  throw ConfigError("unknown baseline form '" + code + "' (expected one of b, c, e, f, d)");
}

std::string baseline_form_code(BaselineForm form) {
  switch (form) {
    case BaselineForm::binary: return "b";
    case BaselineForm::correlation: return "c";
    case BaselineForm::entropy: return "e";
    case BaselineForm::fuzzy: return "f";
    case BaselineForm::dependence: return "d";
  }
  throw ConfigError("invalid baseline form value");
}

CorrelationMatrix correlation_matrix(const Eigen::MatrixXd& Y) {
  const Eigen::Index c = Y.rows();
  const Eigen::MatrixXd gram = Y * Y.transpose();
  Eigen::VectorXd norms = gram.diagonal().array().sqrt();

  CorrelationMatrix out;
  out.R = Eigen::MatrixXd::Zero(c, c);
  for (Eigen::Index k = 0; k < c; ++k) {
    for (Eigen::Index l = 0; l < c; ++l) {
      if (k == l) {
        out.R(k, l) = 1.0;
      } else if (norms(k) > 0.0 && norms(l) > 0.0) {
        out.R(k, l) = gram(k, l) / (norms(k) * norms(l));
      }
    }
  }
  return out;
}

Eigen::MatrixXd correlation_shares(const Eigen::MatrixXd& Y, const CorrelationMatrix& R) {
  if (R.R.rows() != Y.rows())
    throw DataError("dimension error: correlation matrix is " + std::to_string(R.R.rows()) +
                    "x" + std::to_string(R.R.cols()) + " but Y has " +
                    std::to_string(Y.rows()) + " classes");
  Eigen::MatrixXd shares = R.R * Y;  // C x N
  const Eigen::VectorXd counts = label_counts(Y);
  for (Eigen::Index i = 0; i < Y.cols(); ++i) {
    if (counts(i) > 0.0)
      shares.col(i) /= counts(i);
    else
      shares.col(i).setZero();
  }
  return shares;
}

PriorDiagonal prior_correlation(const MultiLabelDataset& ds, Eigen::Index c) {
  PriorDiagonal out;
  out.class_index = c;
  out.member_indices = ds.class_members(c);
  require_nonempty(ds, c, out.member_indices);

  const Eigen::MatrixXd shares = correlation_shares(ds.Y, correlation_matrix(ds.Y));
  out.values.resize(static_cast<Eigen::Index>(out.member_indices.size()));
  for (size_t j = 0; j < out.member_indices.size(); ++j)
    out.values(static_cast<Eigen::Index>(j)) = 1.0 - shares(c, out.member_indices[j]);
  return out;
}

PriorDiagonal prior_binary(const MultiLabelDataset& ds, Eigen::Index c, double constant) {
  if (!(constant >= 0.0))
    throw ConfigError("binary prior constant must be non-negative, got " +
                      std::to_string(constant));
  PriorDiagonal out;
  out.class_index = c;
  out.member_indices = ds.class_members(c);
  require_nonempty(ds, c, out.member_indices);
  out.values = Eigen::VectorXd::Constant(
      static_cast<Eigen::Index>(out.member_indices.size()), constant);
  return out;
}

PriorDiagonal prior_entropy(const MultiLabelDataset& ds, Eigen::Index c) {
  PriorDiagonal out;
  out.class_index = c;
  out.member_indices = ds.class_members(c);
  require_nonempty(ds, c, out.member_indices);

  const Eigen::VectorXd counts = label_counts(ds.Y);
  out.values.resize(static_cast<Eigen::Index>(out.member_indices.size()));
  for (size_t j = 0; j < out.member_indices.size(); ++j)
    out.values(static_cast<Eigen::Index>(j)) = 1.0 - 1.0 / counts(out.member_indices[j]);
  return out;
}

PriorDiagonal prior_misclassification(const MultiLabelDataset& ds, Eigen::Index c) {
  PriorDiagonal out;
  out.class_index = c;
  out.member_indices = ds.class_members(c);
  require_nonempty(ds, c, out.member_indices);

  // Unweighted means of every non-empty class.
  std::vector<Eigen::Index> rivals;
  Eigen::MatrixXd means(ds.n_features(), ds.n_classes());
  for (Eigen::Index l = 0; l < ds.n_classes(); ++l) {
    const std::vector<Eigen::Index> members = ds.class_members(l);
    if (members.empty()) continue;
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(ds.n_features());
    for (Eigen::Index i : members) mean += ds.X.col(i);
    means.col(l) = mean / static_cast<double>(members.size());
    if (l != c) rivals.push_back(l);
  }
  if (ds.n_classes() < 2)
    throw ConfigError("misclassification prior needs at least two classes");
  if (rivals.empty())
    throw DataError("misclassification prior needs at least one rival class with members");

  out.values.resize(static_cast<Eigen::Index>(out.member_indices.size()));
  for (size_t j = 0; j < out.member_indices.size(); ++j) {
    const Eigen::Index i = out.member_indices[j];
    const double own = (ds.X.col(i) - means.col(c)).squaredNorm();
    double rival = std::numeric_limits<double>::infinity();
    for (Eigen::Index l : rivals)
      rival = std::min(rival, (ds.X.col(i) - means.col(l)).squaredNorm());

    double v;
    if (own < rival) {
      v = 0.0;  // nearest mean is the right one
    } else if (own == rival) {
      v = 1.0;  // exactly on the boundary
    } else if (rival == 0.0) {
      throw NumericError("misclassification prior: instance " + std::to_string(i) +
                         " coincides with a rival class mean");
    } else {
      v = own / rival;
    }
    out.values(static_cast<Eigen::Index>(j)) = v;
  }
  return out;
}

Eigen::MatrixXd fuzzy_centroid_update(const MultiLabelDataset& ds, const Eigen::MatrixXd& w) {
  if (w.rows() != ds.n_instances() || w.cols() != ds.n_classes())
    throw DataError("dimension error: membership matrix must be N x C");
  Eigen::MatrixXd centres = Eigen::MatrixXd::Zero(ds.n_features(), ds.n_classes());
  for (Eigen::Index c = 0; c < ds.n_classes(); ++c) {
    const Eigen::ArrayXd w2 = w.col(c).array().square();
    const double total = w2.sum();
    if (total > 0.0) centres.col(c) = (ds.X * w2.matrix()) / total;
  }
  return centres;
}

Eigen::MatrixXd fuzzy_membership_update(const MultiLabelDataset& ds,
                                        const Eigen::MatrixXd& centres) {
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(ds.n_instances(), ds.n_classes());
  for (Eigen::Index i = 0; i < ds.n_instances(); ++i) {
    double denom = 0.0;
    for (Eigen::Index c = 0; c < ds.n_classes(); ++c) {
      if (ds.Y(c, i) <= 0.5) continue;
      const double d2 =
          std::max((ds.X.col(i) - centres.col(c)).squaredNorm(), kDegenerateDistance);
      w(i, c) = 1.0 / d2;
      denom += w(i, c);
    }
    if (denom > 0.0) w.row(i) /= denom;
  }
  return w;
}

namespace {

/// Starting memberships: each instance spreads unit mass uniformly over its
/// positive labels; unlabelled instances contribute nothing.
Eigen::MatrixXd uniform_memberships(const MultiLabelDataset& ds) {
  Eigen::MatrixXd w = ds.Y.transpose();
  const Eigen::VectorXd counts = label_counts(ds.Y);
  for (Eigen::Index i = 0; i < ds.n_instances(); ++i)
    if (counts(i) > 0.0) w.row(i) /= counts(i);
  return w;
}

}  // namespace

MembershipMatrix fuzzy_memberships(const MultiLabelDataset& ds, int max_iters, double tol) {
  MembershipMatrix out;
  out.w = uniform_memberships(ds);
  out.converged = false;
  for (int iter = 0; iter < max_iters; ++iter) {
    const Eigen::MatrixXd centres = fuzzy_centroid_update(ds, out.w);
    Eigen::MatrixXd next = fuzzy_membership_update(ds, centres);
    const double delta = (next - out.w).cwiseAbs().maxCoeff();
    out.w = std::move(next);
    if (delta < tol) {
      out.converged = true;
      break;
    }
  }
  return out;
}

namespace {

/// Assignments worth enumerating exhaustively.  Multi-label instances are the
/// only free coordinates; below this many combinations the dependence
/// objective is maximized exactly instead of by local search.
constexpr double kExactAssignmentLimit = 1024.0;

/// Exhaustive maximization of sum_ij theta_ij [a_i = a_j] over the one-hot
/// assignments of the multi-label instances, single-label instances held at
/// their only candidate.  Writes the winning assignment into w and returns
/// true; returns false when the assignment space exceeds the limit.
bool assign_by_enumeration(const MultiLabelDataset& ds, const Eigen::MatrixXd& theta,
                           Eigen::MatrixXd& w) {
  const Eigen::Index n = ds.n_instances();
  const Eigen::Index classes = ds.n_classes();

  std::vector<Eigen::Index> fixed_label(static_cast<size_t>(n), -1);
  std::vector<Eigen::Index> varying;
  std::vector<std::vector<Eigen::Index>> candidates;
  double combinations = 1.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    std::vector<Eigen::Index> own;
    for (Eigen::Index l = 0; l < classes; ++l)
      if (ds.Y(l, i) > 0.5) own.push_back(l);
    if (own.size() == 1) {
      fixed_label[static_cast<size_t>(i)] = own.front();
    } else if (own.size() > 1) {
      varying.push_back(i);
      candidates.push_back(std::move(own));
      combinations *= static_cast<double>(candidates.back().size());
      if (combinations > kExactAssignmentLimit) return false;
    }
  }

  // Interaction of each free instance with the fixed single-label mass, then
  // an odometer over the free choices scoring only assignment-dependent terms.
  const auto v = static_cast<Eigen::Index>(varying.size());
  Eigen::MatrixXd fixed_affinity = Eigen::MatrixXd::Zero(v, classes);
  for (Eigen::Index a = 0; a < v; ++a)
    for (Eigen::Index j = 0; j < n; ++j)
      if (fixed_label[static_cast<size_t>(j)] >= 0)
        fixed_affinity(a, fixed_label[static_cast<size_t>(j)]) += theta(varying[static_cast<size_t>(a)], j);

  std::vector<size_t> pick(static_cast<size_t>(v), 0);
  std::vector<size_t> best_pick = pick;
  double best_score = -std::numeric_limits<double>::infinity();
  while (true) {
    double score = 0.0;
    for (Eigen::Index a = 0; a < v; ++a) {
      const Eigen::Index ca = candidates[static_cast<size_t>(a)][pick[static_cast<size_t>(a)]];
      score += fixed_affinity(a, ca);
      for (Eigen::Index b = a + 1; b < v; ++b)
        if (candidates[static_cast<size_t>(b)][pick[static_cast<size_t>(b)]] == ca)
          score += theta(varying[static_cast<size_t>(a)], varying[static_cast<size_t>(b)]);
    }
    if (score > best_score) {
      best_score = score;
      best_pick = pick;
    }
    Eigen::Index pos = v - 1;
    for (; pos >= 0; --pos) {
      if (++pick[static_cast<size_t>(pos)] < candidates[static_cast<size_t>(pos)].size()) break;
      pick[static_cast<size_t>(pos)] = 0;
    }
    if (pos < 0) break;
  }

  w.setZero();
  for (Eigen::Index i = 0; i < n; ++i)
    if (fixed_label[static_cast<size_t>(i)] >= 0) w(i, fixed_label[static_cast<size_t>(i)]) = 1.0;
  for (Eigen::Index a = 0; a < v; ++a)
    w(varying[static_cast<size_t>(a)],
      candidates[static_cast<size_t>(a)][best_pick[static_cast<size_t>(a)]]) = 1.0;
  return true;
}

}  // namespace

MembershipMatrix dependence_memberships(const MultiLabelDataset& ds, int max_sweeps) {
  const Eigen::Index n = ds.n_instances();
  const Eigen::Index c = ds.n_classes();

  // Doubly centred feature similarity: theta = H X^T X H with H = I - 11^T/n.
  Eigen::MatrixXd theta = ds.X.transpose() * ds.X;
  const Eigen::VectorXd row_means = theta.rowwise().mean();
  const double grand_mean = row_means.mean();
  theta.colwise() -= row_means;
  theta.rowwise() -= row_means.transpose();
  theta.array() += grand_mean;

  MembershipMatrix out;
  out.w = uniform_memberships(ds);
  out.converged = false;

  // Tiny assignment spaces are solved exactly; coordinate ascent below is the
  // scalable fallback and may settle in a non-global one-hot fixed point.
  if (assign_by_enumeration(ds, theta, out.w)) {
    out.converged = true;
    return out;
  }

  // scores(i, l) = sum_j theta(i, j) * w(j, l); kept in sync as rows flip.
  Eigen::MatrixXd scores = theta * out.w;

  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    bool changed = false;
    for (Eigen::Index i = 0; i < n; ++i) {
      // Candidates are the instance's own labels; the self-similarity term is
      // the same for every candidate and drops out of the comparison.
      Eigen::Index best = -1;
      double best_score = -std::numeric_limits<double>::infinity();
      for (Eigen::Index l = 0; l < c; ++l) {
        if (ds.Y(l, i) <= 0.5) continue;
        const double s = scores(i, l) - theta(i, i) * out.w(i, l);
        if (s > best_score) {
          best_score = s;
          best = l;
        }
      }
      if (best < 0) continue;  // unlabelled instance, nothing to assign

      Eigen::RowVectorXd delta = -out.w.row(i);
      delta(best) += 1.0;
      if (delta.cwiseAbs().maxCoeff() == 0.0) continue;

      scores.noalias() += theta.col(i) * delta;
      out.w.row(i) += delta;
      changed = true;
    }
    if (!changed) {
      out.converged = true;
      break;
    }
  }
  return out;
}

PriorDiagonal prior_from_memberships(const MultiLabelDataset& ds, Eigen::Index c,
                                     const MembershipMatrix& memberships) {
  PriorDiagonal out;
  out.class_index = c;
  out.member_indices = ds.class_members(c);
  require_nonempty(ds, c, out.member_indices);
  out.converged = memberships.converged;
  out.values.resize(static_cast<Eigen::Index>(out.member_indices.size()));
  for (size_t j = 0; j < out.member_indices.size(); ++j)
    out.values(static_cast<Eigen::Index>(j)) = 1.0 - memberships.w(out.member_indices[j], c);
  return out;
}

PriorDiagonal prior_fuzzy(const MultiLabelDataset& ds, Eigen::Index c, int max_iters,
                          double tol) {
  return prior_from_memberships(ds, c, fuzzy_memberships(ds, max_iters, tol));
}

PriorDiagonal prior_dependence(const MultiLabelDataset& ds, Eigen::Index c, int max_sweeps) {
  return prior_from_memberships(ds, c, dependence_memberships(ds, max_sweeps));
}

WeightMatrix baseline_weight_matrix(const MultiLabelDataset& ds, BaselineForm form,
                                    const BaselineOptions& options) {
  WeightMatrix out;
  out.P = Eigen::MatrixXd::Zero(ds.n_classes(), ds.n_instances());

  switch (form) {
    case BaselineForm::binary:
      out.P = ds.Y;
      break;
    case BaselineForm::correlation: {
      const Eigen::MatrixXd shares = correlation_shares(ds.Y, correlation_matrix(ds.Y));
      out.P = shares.cwiseProduct(ds.Y);  // keep shares only on positive labels
      break;
    }
    case BaselineForm::entropy:
      out.P = uniform_memberships(ds).transpose();
      break;
    case BaselineForm::fuzzy: {
      const MembershipMatrix m =
          fuzzy_memberships(ds, options.fuzzy_max_iters, options.fuzzy_tol);
      if (!m.converged)
        out.warnings.push_back("fuzzy memberships did not converge within " +
                               std::to_string(options.fuzzy_max_iters) + " iterations");
      out.P = m.w.transpose();
      break;
    }
    case BaselineForm::dependence: {
      const MembershipMatrix m = dependence_memberships(ds, options.hsic_max_sweeps);
      if (!m.converged)
        out.warnings.push_back("dependence assignment did not settle within " +
                               std::to_string(options.hsic_max_sweeps) + " sweeps");
      out.P = m.w.transpose();
      break;
    }
  }

  out.row_sums = out.P.rowwise().sum();
  out.col_sums = out.P.colwise().sum();
  out.residuals = Eigen::VectorXd::Zero(ds.n_classes());
  for (Eigen::Index c = 0; c < ds.n_classes(); ++c)
    if (ds.class_members(c).empty()) out.empty_classes.push_back(c);
  return out;
}

}  // namespace swmlda
