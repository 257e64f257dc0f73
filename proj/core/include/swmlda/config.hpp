#pragma once

#include "swmlda/dataset.hpp"
#include "swmlda/priors.hpp"
#include "swmlda/projection.hpp"
#include "swmlda/saliency.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace swmlda {

/// The eleven experiment methods: six saliency-weighted variants (one per
/// prior form) and five baselines that use the prior memberships directly as
/// instance weights.
enum class Method {
  swmlda_m, swmlda_c, swmlda_b, swmlda_e, swmlda_f, swmlda_d,
  wmlda_b, wmlda_c, wmlda_e, wmlda_f, wmlda_d,
};

Method method_from_code(const std::string& code);
std::string method_code(Method method);
bool method_is_saliency(Method method);
PriorForm method_prior_form(Method method);        // saliency methods only
BaselineForm method_baseline_form(Method method);  // baseline methods only

enum class DataFormat { csv, arff };

struct DatasetConfig {
  std::string name;        // row label in reports; defaults to the train file stem
  std::string train_path;
  std::string test_path;
  DataFormat format = DataFormat::csv;
  std::vector<std::string> label_names;  // arff: explicit label attribute names
  std::string label_xml;                 // arff: or the companion XML listing them
};

/// Everything a single experiment needs.  Defaults follow the evaluation
/// setup the method was designed around: k = 15 neighbors, 0.5 decision
/// threshold, 0.999 eigenvalue energy.
struct ExperimentConfig {
  DatasetConfig dataset;
  Method method = Method::swmlda_b;
  double sigma = 1.0;
  bool sigma_median = false;
  double epsilon = 1e-6;
  double binary_prior = 1.0;
  double energy = 0.999;
  std::optional<double> ridge;  // absent: 1e-8 * trace of the scatter pair / D
  ScatterPair pair = ScatterPair::b_over_t;
  int k = 15;
  double smoothing = 1.0;
  double threshold = 0.5;
  bool standardize = true;
  bool affinity_squared = false;
  int fuzzy_max_iters = 100;
  double fuzzy_tol = 1e-6;
  int hsic_max_sweeps = 50;
  long long seed = 0;  // reserved; the default pipeline is fully deterministic
  std::string output_path;
};

/// Parses a config JSON document.  Unknown keys, wrong types, and
/// out-of-range values are config errors; missing keys keep their defaults.
ExperimentConfig parse_config_json(const std::string& text);
ExperimentConfig load_config_file(const std::filesystem::path& path);

/// Range and consistency checks; parse_config_json calls this, direct
/// builders of ExperimentConfig may call it themselves.
void validate_config(const ExperimentConfig& config);

/// Canonical JSON snapshot of a config: every field explicit, floats with 17
/// significant digits, keys in fixed order, so identical configs serialize
/// to identical bytes.
std::string config_to_json(const ExperimentConfig& config);

/// Parses a suite document: either a JSON array of full experiment configs,
/// or an object {"defaults": {...}, "datasets": [...], "methods": [...]}
/// expanded to the dataset x method grid.
std::vector<ExperimentConfig> parse_suite_json(const std::string& text);
std::vector<ExperimentConfig> load_suite_file(const std::filesystem::path& path);

/// Display name for reports: explicit name or the train-file stem.
std::string dataset_display_name(const DatasetConfig& dataset);

/// Loads the configured train or test split, resolving ARFF label names
/// through the XML companion when needed.
MultiLabelDataset load_split(const DatasetConfig& dataset, SplitRole role);

}  // namespace swmlda
