#pragma once

#include "swmlda/config.hpp"
#include "swmlda/dataset.hpp"
#include "swmlda/metrics.hpp"
#include "swmlda/mlknn.hpp"
#include "swmlda/projection.hpp"

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace swmlda {

/// The reproducible trace of one experiment: resolved config, metrics,
/// per-stage wall times, and what the projection settled on.
struct RunRecord {
  ExperimentConfig config;
  MetricsReport metrics;
  std::vector<std::pair<std::string, double>> timings_ms;  // stage order preserved
  Eigen::Index selected_dim = 0;
  double ridge = 0.0;  // regularizer actually applied
  std::vector<std::string> warnings;
  std::string artifact_version;
};

/// Runs load -> standardize -> weights -> projection -> classify -> metrics.
/// When config.output_path is set, writes run_record.json, metrics.csv, and
/// predictions.csv there; on failure any files already written are removed.
RunRecord run_experiment(const ExperimentConfig& config);

std::string run_record_to_json(const RunRecord& record);

/// One suite cell: either a completed record or the error that stopped it.
struct SuiteCell {
  std::string dataset;
  std::string method;
  bool ok = false;
  std::string error;
  RunRecord record;
};

struct SuiteResult {
  std::vector<SuiteCell> cells;
};

/// Runs every config, isolating failures per cell.  With a non-empty
/// output_dir, writes each cell's outputs under cells/<dataset>/<method>/
/// and one <metric>.csv plus <metric>.md table (rows = datasets, columns =
/// methods) per metric.  jobs > 1 runs cells in a worker pool; results and
/// reports keep the config order either way.
SuiteResult run_suite(const std::vector<ExperimentConfig>& configs,
                      const std::filesystem::path& output_dir, int jobs = 1);

/// Computes the weight matrix for the configured method and writes it to
/// output_dir: weights.csv (C x N values), residuals.csv (per-class solve
/// residuals), and warnings.txt (empty classes, convergence notes).
void dump_weights(const ExperimentConfig& config, const std::filesystem::path& output_dir);

/// Everything needed to classify new data, as produced by `train`.
struct TrainedModel {
  std::string artifact_version;
  ExperimentConfig config;
  bool standardized = false;
  StandardizationStats stats;  // meaningful when standardized
  Projection projection;
  MlknnModel classifier;
  std::vector<std::string> class_names;
  std::vector<std::string> warnings;
};

TrainedModel train_model(const ExperimentConfig& config);

/// JSON model file with 17-significant-digit floats; loading restores every
/// matrix bit-exactly.
void save_model(const TrainedModel& model, const std::filesystem::path& path);
TrainedModel load_model(const std::filesystem::path& path);

/// Standardizes (if the model was trained that way), projects, classifies,
/// and scores a test split.
MetricsReport eval_model(const TrainedModel& model, const MultiLabelDataset& test);

/// Prediction CSV: per test instance, probability columns then label columns.
void save_predictions_csv(const PredictionSet& predictions,
                          const std::vector<std::string>& class_names,
                          const std::filesystem::path& path);

/// One-row metrics CSV keyed by dataset and method.
void save_metrics_csv(const std::string& dataset, const std::string& method,
                      const MetricsReport& metrics, const std::filesystem::path& path);

}  // namespace swmlda
