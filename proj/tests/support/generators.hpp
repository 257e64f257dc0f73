// Seeded random inputs for the property tests.  Every generator is a pure
// function of its seed so failures reproduce exactly.
#pragma once

#include "swmlda/dataset.hpp"
#include "swmlda/priors.hpp"
#include "swmlda/saliency.hpp"

#include <Eigen/Core>

#include <random>
#include <string>
#include <vector>

namespace gen {

struct DatasetOptions {
  double extra_label_prob = 0.25;   // chance of each secondary label
  double unlabelled_prob = 0.0;     // chance an instance keeps no labels
  double class_spread = 3.0;        // distance scale between class centres
};

// Random multi-label dataset: class centres drawn in a box, instances around
// the mean of their label centres.  Every class is guaranteed at least one
// member so per-class operations stay well defined.
inline swmlda::MultiLabelDataset random_dataset(unsigned seed, Eigen::Index D, Eigen::Index N,
                                                Eigen::Index C,
                                                const DatasetOptions& opt = {}) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> box(-opt.class_spread, opt.class_spread);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::uniform_int_distribution<Eigen::Index> pick_class(0, C - 1);

  Eigen::MatrixXd centres(D, C);
  for (Eigen::Index c = 0; c < C; ++c)
    for (Eigen::Index d = 0; d < D; ++d) centres(d, c) = box(rng);

  swmlda::MultiLabelDataset ds;
  ds.X.resize(D, N);
  ds.Y = Eigen::MatrixXd::Zero(C, N);
  for (Eigen::Index i = 0; i < N; ++i) {
    if (coin(rng) >= opt.unlabelled_prob) {
      ds.Y(pick_class(rng), i) = 1.0;
      for (Eigen::Index c = 0; c < C; ++c)
        if (ds.Y(c, i) == 0.0 && coin(rng) < opt.extra_label_prob) ds.Y(c, i) = 1.0;
    }
    Eigen::VectorXd centre = Eigen::VectorXd::Zero(D);
    const double labels = ds.Y.col(i).sum();
    if (labels > 0.0) {
      for (Eigen::Index c = 0; c < C; ++c)
        if (ds.Y(c, i) > 0.0) centre += centres.col(c);
      centre /= labels;
    }
    for (Eigen::Index d = 0; d < D; ++d) ds.X(d, i) = centre(d) + noise(rng);
  }

  // Backfill any class that ended up empty.
  for (Eigen::Index c = 0; c < C; ++c)
    if (ds.Y.row(c).sum() == 0.0) ds.Y(c, (static_cast<Eigen::Index>(seed) + 7 * c) % N) = 1.0;

  for (Eigen::Index d = 0; d < D; ++d) ds.feature_names.push_back("x" + std::to_string(d));
  for (Eigen::Index c = 0; c < C; ++c) ds.class_names.push_back("class" + std::to_string(c));
  return ds;
}

// Random saliency system: symmetric affinity with unit diagonal, non-negative
// prior diagonal, and a regularizer drawn from a spread of magnitudes.
inline swmlda::ClassGraph random_graph(unsigned seed, Eigen::Index n) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> prior(0.0, 2.0);

  swmlda::ClassGraph graph;
  graph.class_index = 0;
  graph.W.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    graph.W(i, i) = 1.0;
    for (Eigen::Index j = i + 1; j < n; ++j) graph.W(i, j) = graph.W(j, i) = unit(rng);
  }
  graph.degree = graph.W.rowwise().sum();

  graph.V.class_index = 0;
  graph.V.values.resize(n);
  const bool zero_prior = unit(rng) < 0.2;  // exercise the epsilon-only case too
  for (Eigen::Index i = 0; i < n; ++i) {
    graph.V.member_indices.push_back(i);
    graph.V.values(i) = zero_prior ? 0.0 : prior(rng);
  }

  const double epsilons[] = {1e-6, 1e-3, 1e-1};
  graph.epsilon = epsilons[seed % 3];
  graph.sigma = 1.0;
  return graph;
}

// Feature columns of the instances labelled with class c, as one matrix.
inline Eigen::MatrixXd member_columns(const swmlda::MultiLabelDataset& ds, Eigen::Index c) {
  const std::vector<Eigen::Index> members = ds.class_members(c);
  Eigen::MatrixXd cols(ds.X.rows(), static_cast<Eigen::Index>(members.size()));
  for (size_t j = 0; j < members.size(); ++j)
    cols.col(static_cast<Eigen::Index>(j)) = ds.X.col(members[j]);
  return cols;
}

// Random non-negative weight matrix with every row and column given some
// mass, as scatter computations expect.
inline Eigen::MatrixXd random_weights(unsigned seed, Eigen::Index C, Eigen::Index N) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Eigen::MatrixXd P(C, N);
  for (Eigen::Index c = 0; c < C; ++c)
    for (Eigen::Index i = 0; i < N; ++i) {
      const double value = unit(rng);
      P(c, i) = value < 0.4 ? 0.0 : value;  // plenty of structural zeros
    }
  for (Eigen::Index c = 0; c < C; ++c)
    if (P.row(c).sum() == 0.0) P(c, static_cast<Eigen::Index>(seed) % N) = 0.5;
  for (Eigen::Index i = 0; i < N; ++i)
    if (P.col(i).sum() == 0.0) P(static_cast<Eigen::Index>(seed) % C, i) = 0.5;
  return P;
}

}  // namespace gen
