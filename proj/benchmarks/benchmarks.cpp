#include "swmlda/dataset.hpp"
#include "swmlda/mlknn.hpp"
#include "swmlda/projection.hpp"
#include "swmlda/saliency.hpp"

#include <benchmark/benchmark.h>

#include <random>

using namespace swmlda;

namespace {

/// Synthetic multi-label data: C well-separated class centers, instances
/// drawn around the centers of their labels.
MultiLabelDataset synthetic(int features, int instances, int classes, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> gauss;
  std::uniform_int_distribution<int> pick(0, classes - 1);
  std::bernoulli_distribution extra(0.3);

  Eigen::MatrixXd centers(features, classes);
  for (int c = 0; c < classes; ++c)
    for (int d = 0; d < features; ++d) centers(d, c) = 4.0 * gauss(rng);

  MultiLabelDataset ds;
  ds.X.resize(features, instances);
  ds.Y = Eigen::MatrixXd::Zero(classes, instances);
  for (int i = 0; i < instances; ++i) {
    const int primary = pick(rng);
    ds.Y(primary, i) = 1.0;
    if (classes > 1 && extra(rng)) ds.Y((primary + 1) % classes, i) = 1.0;
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(features);
    double count = 0.0;
    for (int c = 0; c < classes; ++c)
      if (ds.Y(c, i) > 0.5) {
        mean += centers.col(c);
        count += 1.0;
      }
    mean /= count;
    for (int d = 0; d < features; ++d) ds.X(d, i) = mean(d) + gauss(rng);
  }
  for (int c = 0; c < classes; ++c) ds.Y(c, c % instances) = 1.0;
  for (int d = 0; d < features; ++d) ds.feature_names.push_back("x" + std::to_string(d));
  for (int c = 0; c < classes; ++c) ds.class_names.push_back("c" + std::to_string(c));
  return ds;
}

void bm_affinity(benchmark::State& state) {
  const auto members =
      synthetic(32, static_cast<int>(state.range(0)), 1, 7).X;
  for (auto _ : state) {
    benchmark::DoNotOptimize(build_affinity(members, 1.0));
  }
}
BENCHMARK(bm_affinity)->Arg(64)->Arg(256)->Arg(1024);

void bm_saliency_solve(benchmark::State& state) {
  const auto members = synthetic(32, static_cast<int>(state.range(0)), 1, 11).X;
  ClassGraph graph = build_affinity(members, 1.0);
  graph.V.member_indices.resize(static_cast<size_t>(members.cols()));
  graph.V.values = Eigen::VectorXd::Zero(members.cols());
  for (auto _ : state) {
    benchmark::DoNotOptimize(pse_solve(graph));
  }
}
BENCHMARK(bm_saliency_solve)->Arg(64)->Arg(256)->Arg(1024);

void bm_weight_matrix(benchmark::State& state) {
  const MultiLabelDataset ds = synthetic(32, static_cast<int>(state.range(0)), 6, 13);
  SaliencyOptions options;
  options.form = PriorForm::entropy;
  for (auto _ : state) {
    benchmark::DoNotOptimize(saliency_weights(ds, options));
  }
}
BENCHMARK(bm_weight_matrix)->Arg(256)->Arg(1024);

void bm_scatter(benchmark::State& state) {
  const MultiLabelDataset ds = synthetic(static_cast<int>(state.range(0)), 1024, 6, 17);
  SaliencyOptions options;
  options.form = PriorForm::binary;
  const WeightMatrix P = saliency_weights(ds, options);
  for (auto _ : state) {
    benchmark::DoNotOptimize(scatter_matrices(ds.X, P.P));
  }
}
BENCHMARK(bm_scatter)->Arg(32)->Arg(128)->Arg(512);

void bm_projection(benchmark::State& state) {
  const MultiLabelDataset ds = synthetic(static_cast<int>(state.range(0)), 512, 6, 19);
  SaliencyOptions options;
  const WeightMatrix P = saliency_weights(ds, options);
  for (auto _ : state) {
    benchmark::DoNotOptimize(fit_projection_from_data(ds.X, P.P, ScatterPair::b_over_t, 0.999));
  }
}
BENCHMARK(bm_projection)->Arg(64)->Arg(256);

void bm_mlknn_query(benchmark::State& state) {
  const MultiLabelDataset train = synthetic(8, static_cast<int>(state.range(0)), 6, 23);
  const MultiLabelDataset test = synthetic(8, 128, 6, 29);
  const MlknnModel model = mlknn_fit(train.X, train.Y, 15, 1.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(mlknn_predict(model, test.X, 0.5));
  }
}
BENCHMARK(bm_mlknn_query)->Arg(512)->Arg(2048);

}  // namespace

BENCHMARK_MAIN();
