#include "swmlda/mlknn.hpp"

#include "swmlda/errors.hpp"

#include <algorithm>
#include <limits>
#include <string>
#include <vector>

namespace swmlda {

namespace {

constexpr Eigen::Index kQueryChunk = 256;

/// k nearest training columns for each query column, by squared Euclidean
/// distance with index agreement on ties.  exclude_self skips query column j
/// in its own neighbor list (used when querying the training set against
/// itself).  Returns an N_query x k index matrix.
std::vector<std::vector<Eigen::Index>> nearest_neighbors(const Eigen::MatrixXd& train,
                                                         const Eigen::MatrixXd& queries,
                                                         int k, bool exclude_self) {
  const Eigen::Index n = train.cols();
  const Eigen::Index m = queries.cols();
  const Eigen::VectorXd train_norms = train.colwise().squaredNorm();

  std::vector<std::vector<Eigen::Index>> result(static_cast<size_t>(m));
  std::vector<std::pair<double, Eigen::Index>> order(static_cast<size_t>(n));

  for (Eigen::Index start = 0; start < m; start += kQueryChunk) {
    const Eigen::Index count = std::min(kQueryChunk, m - start);
    // dist^2(i, q) = |z_i|^2 - 2 <z_i, q> + |q|^2; the query norm is common
    // to the whole column and irrelevant to the ordering.
    const Eigen::MatrixXd cross =
        train.transpose() * queries.middleCols(start, count);  // n x count

    for (Eigen::Index local = 0; local < count; ++local) {
      const Eigen::Index q = start + local;
      for (Eigen::Index i = 0; i < n; ++i)
        order[static_cast<size_t>(i)] = {train_norms(i) - 2.0 * cross(i, local), i};
      if (exclude_self)
        order[static_cast<size_t>(q)].first = std::numeric_limits<double>::infinity();

      std::partial_sort(order.begin(), order.begin() + k, order.end());
      std::vector<Eigen::Index>& picks = result[static_cast<size_t>(q)];
      picks.resize(static_cast<size_t>(k));
      for (int j = 0; j < k; ++j) picks[static_cast<size_t>(j)] = order[static_cast<size_t>(j)].second;
    }
  }
  return result;
}

}  // namespace

MlknnModel mlknn_fit(const Eigen::MatrixXd& Z_train, const Eigen::MatrixXd& Y_train, int k,
                     double smoothing) {
  const Eigen::Index n = Z_train.cols();
  const Eigen::Index c = Y_train.rows();
  if (Y_train.cols() != n)
    throw DataError("dimension error: " + std::to_string(n) + " projected instances but " +
                    std::to_string(Y_train.cols()) + " label columns");
  if (k < 1) throw ConfigError("neighbor count k must be at least 1, got " + std::to_string(k));
  if (k >= n)
    throw ConfigError("neighbor count k = " + std::to_string(k) +
                      " must be smaller than the training set size " + std::to_string(n));
  if (!(smoothing > 0.0))
    throw ConfigError("smoothing must be positive, got " + std::to_string(smoothing));

  MlknnModel model;
  model.Z_train = Z_train;
  model.Y_train = Y_train;
  model.k = k;
  model.smoothing = smoothing;

  const Eigen::VectorXd positives = Y_train.rowwise().sum();
  const double nd = static_cast<double>(n);
  model.prior = (positives.array() + smoothing) / (2.0 * smoothing + nd);
  model.prior_neg = ((nd - positives.array()) + smoothing) / (2.0 * smoothing + nd);

  // kappa(c, j): positive training instances of class c whose k neighbors
  // include exactly j positives; kappa_neg likewise for negatives.
  Eigen::MatrixXd kappa = Eigen::MatrixXd::Zero(c, k + 1);
  Eigen::MatrixXd kappa_neg = Eigen::MatrixXd::Zero(c, k + 1);
  const auto neighbors = nearest_neighbors(Z_train, Z_train, k, /*exclude_self=*/true);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index cls = 0; cls < c; ++cls) {
      int count = 0;
      for (Eigen::Index j : neighbors[static_cast<size_t>(i)])
        if (Y_train(cls, j) > 0.5) ++count;
      if (Y_train(cls, i) > 0.5)
        kappa(cls, count) += 1.0;
      else
        kappa_neg(cls, count) += 1.0;
    }
  }

  const double bins = smoothing * static_cast<double>(k + 1);
  model.cond.resize(c, k + 1);
  model.cond_neg.resize(c, k + 1);
  for (Eigen::Index cls = 0; cls < c; ++cls) {
    model.cond.row(cls) = (kappa.row(cls).array() + smoothing) / (bins + positives(cls));
    model.cond_neg.row(cls) =
        (kappa_neg.row(cls).array() + smoothing) / (bins + (nd - positives(cls)));
  }
  return model;
}

PredictionSet mlknn_predict(const MlknnModel& model, const Eigen::MatrixXd& Z_test,
                            double threshold) {
  if (Z_test.rows() != model.Z_train.rows())
    throw DataError("dimension error: model expects " + std::to_string(model.Z_train.rows()) +
                    " projected features, test data has " + std::to_string(Z_test.rows()));

  const Eigen::Index c = model.Y_train.rows();
  const Eigen::Index m = Z_test.cols();
  PredictionSet out;
  out.threshold = threshold;
  out.probs.resize(c, m);
  out.labels.resize(c, m);

  const auto neighbors =
      nearest_neighbors(model.Z_train, Z_test, model.k, /*exclude_self=*/false);
  for (Eigen::Index q = 0; q < m; ++q) {
    for (Eigen::Index cls = 0; cls < c; ++cls) {
      int count = 0;
      for (Eigen::Index j : neighbors[static_cast<size_t>(q)])
        if (model.Y_train(cls, j) > 0.5) ++count;
      const double on = model.prior(cls) * model.cond(cls, count);
      const double off = model.prior_neg(cls) * model.cond_neg(cls, count);
      const double p = on / (on + off);
      out.probs(cls, q) = p;
      out.labels(cls, q) = p >= threshold ? 1.0 : 0.0;
    }
  }
  return out;
}

}  // namespace swmlda
