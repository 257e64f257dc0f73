#include "swmlda/experiment.hpp"

#include "swmlda/errors.hpp"
#include "swmlda/saliency.hpp"
#include "swmlda/version.hpp"
#include "json_writer.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <future>
#include <sstream>

namespace swmlda {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

std::string strip_error_prefix(const char* what) {
  std::string msg(what);
  for (const char* prefix : {"config error: ", "data error: ", "numeric error: "}) {
    if (msg.rfind(prefix, 0) == 0) return msg.substr(std::strlen(prefix));
  }
  return msg;
}

/// Runs one pipeline stage, records its wall time, and annotates any error
/// with the stage name while keeping the error category.
template <typename F>
auto timed_stage(const char* name, std::vector<std::pair<std::string, double>>& timings,
                 F&& body) {
  const auto start = Clock::now();
  try {
    auto result = body();
    timings.emplace_back(name, ms_since(start));
    return result;
  } catch (const ConfigError& e) {
    throw ConfigError(std::string(name) + " stage: " + strip_error_prefix(e.what()));
  } catch (const DataError& e) {
    throw DataError(std::string(name) + " stage: " + strip_error_prefix(e.what()));
  } catch (const NumericError& e) {
    throw NumericError(std::string(name) + " stage: " + strip_error_prefix(e.what()));
  }
}

SaliencyOptions saliency_options_of(const ExperimentConfig& config) {
  SaliencyOptions options;
  options.form = method_prior_form(config.method);
  options.sigma = config.sigma;
  options.sigma_median = config.sigma_median;
  options.affinity_squared = config.affinity_squared;
  options.epsilon = config.epsilon;
  options.binary_constant = config.binary_prior;
  options.fuzzy_max_iters = config.fuzzy_max_iters;
  options.fuzzy_tol = config.fuzzy_tol;
  options.hsic_max_sweeps = config.hsic_max_sweeps;
  return options;
}

BaselineOptions baseline_options_of(const ExperimentConfig& config) {
  BaselineOptions options;
  options.fuzzy_max_iters = config.fuzzy_max_iters;
  options.fuzzy_tol = config.fuzzy_tol;
  options.hsic_max_sweeps = config.hsic_max_sweeps;
  return options;
}

WeightMatrix weights_for(const ExperimentConfig& config, const MultiLabelDataset& train) {
  if (method_is_saliency(config.method))
    return saliency_weights(train, saliency_options_of(config));
  return baseline_weight_matrix(train, method_baseline_form(config.method),
                                baseline_options_of(config));
}

void check_split_compatibility(const MultiLabelDataset& train, const MultiLabelDataset& test) {
  if (train.n_features() != test.n_features())
    throw DataError("dimension error: train split has " + std::to_string(train.n_features()) +
                    " features, test split has " + std::to_string(test.n_features()));
  if (train.n_classes() != test.n_classes())
    throw DataError("dimension error: train split has " + std::to_string(train.n_classes()) +
                    " classes, test split has " + std::to_string(test.n_classes()));
  if (!train.class_names.empty() && !test.class_names.empty() &&
      train.class_names != test.class_names)
    throw DataError("test split class names differ from the training split");
}

/// Removes everything this run managed to write before it failed.
class OutputGuard {
public:
  ~OutputGuard() {
    if (armed_) {
      for (const auto& path : written_) {
        std::error_code ec;
        std::filesystem::remove(path, ec);
      }
    }
  }
  void track(const std::filesystem::path& path) { written_.push_back(path); }
  void disarm() { armed_ = false; }

private:
  bool armed_ = true;
  std::vector<std::filesystem::path> written_;
};

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw DataError("write to '" + path.string() + "' failed");
}

std::string metrics_json(const MetricsReport& metrics) {
  jsonw::Node skipped;
  skipped.integer("one_error", metrics.skipped_one_error);
  skipped.integer("coverage", metrics.skipped_coverage);
  skipped.integer("ranking_loss", metrics.skipped_ranking_loss);

  jsonw::Node node;
  node.num("one_error", metrics.one_error);
  node.num("coverage", metrics.coverage);
  node.num("ranking_loss", metrics.ranking_loss);
  node.num("hamming_loss", metrics.hamming_loss);
  node.num("macro_f1", metrics.macro_f1);
  node.raw("skipped_instances", skipped.str());
  return node.str();
}

std::string sanitize_component(const std::string& name) {
  std::string out;
  for (char ch : name) {
    const bool ok = (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') ||
                    (ch >= '0' && ch <= '9') || ch == '-' || ch == '_' || ch == '.';
    out.push_back(ok ? ch : '_');
  }
  return out.empty() ? std::string("unnamed") : out;
}

}  // namespace

std::string run_record_to_json(const RunRecord& record) {
  jsonw::Node timings;
  for (const auto& [stage, elapsed] : record.timings_ms) timings.num(stage, elapsed);

  jsonw::Node root;
  root.str("artifact_version", record.artifact_version);
  root.raw("config", config_to_json(record.config));
  root.raw("metrics", metrics_json(record.metrics));
  root.raw("timings_ms", timings.str());
  root.integer("selected_dim", record.selected_dim);
  root.num("ridge", record.ridge);
  root.raw("warnings", jsonw::string_array(record.warnings));
  return root.str();
}

void save_metrics_csv(const std::string& dataset, const std::string& method,
                      const MetricsReport& metrics, const std::filesystem::path& path) {
  std::ostringstream out;
  out << "dataset,method,one_error,coverage,ranking_loss,hamming_loss,macro_f1\n";
  out << dataset << ',' << method << ',' << jsonw::number(metrics.one_error) << ','
      << jsonw::number(metrics.coverage) << ',' << jsonw::number(metrics.ranking_loss) << ','
      << jsonw::number(metrics.hamming_loss) << ',' << jsonw::number(metrics.macro_f1)
      << '\n';
  write_text_file(path, out.str());
}

void save_predictions_csv(const PredictionSet& predictions,
                          const std::vector<std::string>& class_names,
                          const std::filesystem::path& path) {
  const Eigen::Index c = predictions.probs.rows();
  const Eigen::Index m = predictions.probs.cols();
  auto name_of = [&](Eigen::Index cls) {
    return cls < static_cast<Eigen::Index>(class_names.size())
               ? class_names[static_cast<size_t>(cls)]
               : "y" + std::to_string(cls);
  };

  std::ostringstream out;
  out << "instance";
  for (Eigen::Index cls = 0; cls < c; ++cls) out << ",prob:" << name_of(cls);
  for (Eigen::Index cls = 0; cls < c; ++cls) out << ",label:" << name_of(cls);
  out << '\n';
  for (Eigen::Index i = 0; i < m; ++i) {
    out << i;
    for (Eigen::Index cls = 0; cls < c; ++cls)
      out << ',' << jsonw::number(predictions.probs(cls, i));
    for (Eigen::Index cls = 0; cls < c; ++cls)
      out << ',' << (predictions.labels(cls, i) > 0.5 ? '1' : '0');
    out << '\n';
  }
  write_text_file(path, out.str());
}

RunRecord run_experiment(const ExperimentConfig& config) {
  validate_config(config);

  RunRecord record;
  record.config = config;
  record.artifact_version = kVersion;

  auto splits = timed_stage("load", record.timings_ms, [&] {
    auto train = load_split(config.dataset, SplitRole::train);
    auto test = load_split(config.dataset, SplitRole::test);
    check_split_compatibility(train, test);
    return std::make_pair(std::move(train), std::move(test));
  });
  MultiLabelDataset& train = splits.first;
  MultiLabelDataset& test = splits.second;

  if (config.standardize) {
    timed_stage("standardize", record.timings_ms, [&] {
      const StandardizationStats stats = fit_standardizer(train);
      train = apply_standardizer(train, stats);
      test = apply_standardizer(test, stats);
      return 0;
    });
  }

  const WeightMatrix weights =
      timed_stage("weights", record.timings_ms, [&] { return weights_for(config, train); });
  record.warnings = weights.warnings;

  const Projection projection = timed_stage("projection", record.timings_ms, [&] {
    return fit_projection_from_data(train.X, weights.P, config.pair, config.energy,
                                    config.ridge);
  });
  record.selected_dim = projection.W.cols();
  record.ridge = projection.ridge;

  const PredictionSet predictions = timed_stage("classify", record.timings_ms, [&] {
    const Eigen::MatrixXd z_train = transform(projection, train.X);
    const Eigen::MatrixXd z_test = transform(projection, test.X);
    const MlknnModel model = mlknn_fit(z_train, train.Y, config.k, config.smoothing);
    return mlknn_predict(model, z_test, config.threshold);
  });

  record.metrics = timed_stage("metrics", record.timings_ms,
                               [&] { return evaluate(test.Y, predictions); });

  if (!config.output_path.empty()) {
    const std::filesystem::path dir(config.output_path);
    std::filesystem::create_directories(dir);
    OutputGuard guard;

    const auto record_path = dir / "run_record.json";
    guard.track(record_path);
    write_text_file(record_path, run_record_to_json(record) + "\n");

    const auto metrics_path = dir / "metrics.csv";
    guard.track(metrics_path);
    save_metrics_csv(dataset_display_name(config.dataset), method_code(config.method),
                     record.metrics, metrics_path);

    const auto predictions_path = dir / "predictions.csv";
    guard.track(predictions_path);
    save_predictions_csv(predictions, test.class_names, predictions_path);

    guard.disarm();
  }
  return record;
}

SuiteResult run_suite(const std::vector<ExperimentConfig>& configs,
                      const std::filesystem::path& output_dir, int jobs) {
  if (configs.empty()) throw ConfigError("suite has no experiments to run");
  if (jobs < 1) throw ConfigError("jobs must be at least 1");

  SuiteResult result;
  result.cells.resize(configs.size());

  auto run_cell = [&](size_t index) {
    SuiteCell& cell = result.cells[index];
    ExperimentConfig config = configs[index];
    cell.dataset = dataset_display_name(config.dataset);
    cell.method = method_code(config.method);
    if (!output_dir.empty()) {
      config.output_path = (output_dir / "cells" / sanitize_component(cell.dataset) /
                            sanitize_component(cell.method))
                               .string();
    }
    try {
      cell.record = run_experiment(config);
      cell.ok = true;
    } catch (const std::exception& e) {
      cell.ok = false;
      cell.error = e.what();
    }
  };

  if (jobs == 1) {
    for (size_t i = 0; i < configs.size(); ++i) run_cell(i);
  } else {
    // Fixed-size worker pool over a shared index counter.
    std::atomic<size_t> next{0};
    std::vector<std::future<void>> workers;
    const size_t pool = std::min<size_t>(static_cast<size_t>(jobs), configs.size());
    for (size_t w = 0; w < pool; ++w) {
      workers.push_back(std::async(std::launch::async, [&] {
        for (size_t i = next.fetch_add(1); i < configs.size(); i = next.fetch_add(1))
          run_cell(i);
      }));
    }
    for (auto& worker : workers) worker.get();
  }

  if (!output_dir.empty()) {
    std::filesystem::create_directories(output_dir);

    std::vector<std::string> datasets;
    std::vector<std::string> methods;
    for (const SuiteCell& cell : result.cells) {
      if (std::find(datasets.begin(), datasets.end(), cell.dataset) == datasets.end())
        datasets.push_back(cell.dataset);
      if (std::find(methods.begin(), methods.end(), cell.method) == methods.end())
        methods.push_back(cell.method);
    }

    auto cell_of = [&](const std::string& dataset,
                       const std::string& method) -> const SuiteCell* {
      for (const SuiteCell& cell : result.cells)
        if (cell.dataset == dataset && cell.method == method) return &cell;
      return nullptr;
    };

    struct MetricColumn {
      const char* name;
      double MetricsReport::* field;
    };
    const MetricColumn columns[] = {
        {"one_error", &MetricsReport::one_error},
        {"coverage", &MetricsReport::coverage},
        {"ranking_loss", &MetricsReport::ranking_loss},
        {"hamming_loss", &MetricsReport::hamming_loss},
        {"macro_f1", &MetricsReport::macro_f1},
    };

    for (const MetricColumn& column : columns) {
      std::ostringstream csv;
      std::ostringstream md;
      csv << "dataset";
      md << "| dataset |";
      for (const std::string& method : methods) {
        csv << ',' << method;
        md << ' ' << method << " |";
      }
      csv << '\n';
      md << "\n|---|";
      for (size_t i = 0; i < methods.size(); ++i) md << "---|";
      md << '\n';

      for (const std::string& dataset : datasets) {
        csv << dataset;
        md << "| " << dataset << " |";
        for (const std::string& method : methods) {
          const SuiteCell* cell = cell_of(dataset, method);
          if (cell && cell->ok) {
            const double value = cell->record.metrics.*column.field;
            char rounded[32];
            std::snprintf(rounded, sizeof rounded, "%.4f", value);
            csv << ',' << jsonw::number(value);
            md << ' ' << rounded << " |";
          } else {
            csv << ",FAILED";
            md << " FAILED |";
          }
        }
        csv << '\n';
        md << '\n';
      }
      write_text_file(output_dir / (std::string(column.name) + ".csv"), csv.str());
      write_text_file(output_dir / (std::string(column.name) + ".md"), md.str());
    }

    jsonw::Node cells(true);
    for (const SuiteCell& cell : result.cells) {
      jsonw::Node node;
      node.str("dataset", cell.dataset);
      node.str("method", cell.method);
      node.boolean("ok", cell.ok);
      if (cell.ok)
        node.raw("metrics", metrics_json(cell.record.metrics));
      else
        node.str("error", cell.error);
      cells.push(node.str());
    }
    jsonw::Node summary;
    summary.str("artifact_version", kVersion);
    summary.raw("cells", cells.str());
    write_text_file(output_dir / "suite_summary.json", summary.str() + "\n");
  }
  return result;
}

void dump_weights(const ExperimentConfig& config, const std::filesystem::path& output_dir) {
  validate_config(config);
  if (output_dir.empty()) throw ConfigError("weight dump needs an output directory");

  MultiLabelDataset train = load_split(config.dataset, SplitRole::train);
  if (config.standardize) train = apply_standardizer(train, fit_standardizer(train));
  const WeightMatrix weights = weights_for(config, train);

  std::filesystem::create_directories(output_dir);

  std::ostringstream matrix;
  for (Eigen::Index c = 0; c < weights.P.rows(); ++c) {
    for (Eigen::Index i = 0; i < weights.P.cols(); ++i) {
      if (i) matrix << ',';
      matrix << jsonw::number(weights.P(c, i));
    }
    matrix << '\n';
  }
  write_text_file(output_dir / "weights.csv", matrix.str());

  std::ostringstream residuals;
  residuals << "class,name,residual\n";
  for (Eigen::Index c = 0; c < weights.P.rows(); ++c) {
    const std::string name = c < static_cast<Eigen::Index>(train.class_names.size())
                                 ? train.class_names[static_cast<size_t>(c)]
                                 : "y" + std::to_string(c);
    const double r = c < weights.residuals.size() ? weights.residuals(c) : 0.0;
    residuals << c << ',' << name << ',' << jsonw::number(r) << '\n';
  }
  write_text_file(output_dir / "residuals.csv", residuals.str());

  std::ostringstream warnings;
  for (const std::string& warning : weights.warnings) warnings << warning << '\n';
  write_text_file(output_dir / "warnings.txt", warnings.str());
}

TrainedModel train_model(const ExperimentConfig& config) {
  validate_config(config);

  TrainedModel model;
  model.artifact_version = kVersion;
  model.config = config;

  MultiLabelDataset train = load_split(config.dataset, SplitRole::train);
  model.class_names = train.class_names;
  model.standardized = config.standardize;
  if (config.standardize) {
    model.stats = fit_standardizer(train);
    train = apply_standardizer(train, model.stats);
  }

  const WeightMatrix weights = weights_for(config, train);
  model.warnings = weights.warnings;
  model.projection = fit_projection_from_data(train.X, weights.P, config.pair, config.energy,
                                              config.ridge);
  const Eigen::MatrixXd z_train = transform(model.projection, train.X);
  model.classifier = mlknn_fit(z_train, train.Y, config.k, config.smoothing);
  return model;
}

MetricsReport eval_model(const TrainedModel& model, const MultiLabelDataset& test) {
  MultiLabelDataset prepared = test;
  if (model.standardized) prepared = apply_standardizer(test, model.stats);
  const Eigen::MatrixXd z_test = transform(model.projection, prepared.X);
  const PredictionSet predictions =
      mlknn_predict(model.classifier, z_test, model.config.threshold);
  return evaluate(prepared.Y, predictions);
}

}  // namespace swmlda
