#include "swmlda/config.hpp"

#include "swmlda/errors.hpp"
#include "json_writer.hpp"

#include <json.hpp>

#include <fstream>
#include <set>
#include <sstream>

namespace swmlda {

namespace {

using nlohmann::json;

Method kMethods[] = {
    Method::swmlda_m, Method::swmlda_c, Method::swmlda_b, Method::swmlda_e,
    Method::swmlda_f, Method::swmlda_d, Method::wmlda_b,  Method::wmlda_c,
    Method::wmlda_e,  Method::wmlda_f,  Method::wmlda_d,
};

void reject_unknown_keys(const json& obj, const std::set<std::string>& allowed,
                         const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    if (!allowed.count(key))
      throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

double require_number(const json& v, const std::string& key) {
  if (!v.is_number()) throw ConfigError("'" + key + "' must be a number");
  return v.get<double>();
}

long long require_integer(const json& v, const std::string& key) {
  if (!v.is_number_integer()) throw ConfigError("'" + key + "' must be an integer");
  return v.get<long long>();
}

bool require_boolean(const json& v, const std::string& key) {
  if (!v.is_boolean()) throw ConfigError("'" + key + "' must be a boolean");
  return v.get<bool>();
}

std::string require_string(const json& v, const std::string& key) {
  if (!v.is_string()) throw ConfigError("'" + key + "' must be a string");
  return v.get<std::string>();
}

DatasetConfig parse_dataset(const json& obj) {
  if (!obj.is_object()) throw ConfigError("'dataset' must be an object");
  reject_unknown_keys(obj, {"name", "train_path", "test_path", "format", "label_names",
                            "label_xml"},
                      "dataset");
  DatasetConfig ds;
  if (obj.contains("name")) ds.name = require_string(obj["name"], "dataset.name");
  if (obj.contains("train_path"))
    ds.train_path = require_string(obj["train_path"], "dataset.train_path");
  if (obj.contains("test_path"))
    ds.test_path = require_string(obj["test_path"], "dataset.test_path");
  if (obj.contains("format")) {
    const std::string f = require_string(obj["format"], "dataset.format");
    if (f == "csv") ds.format = DataFormat::csv;
    else if (f == "arff") ds.format = DataFormat::arff;
    else throw ConfigError("dataset.format must be 'csv' or 'arff', got '" + f + "'");
  }
  if (obj.contains("label_names")) {
    if (!obj["label_names"].is_array())
      throw ConfigError("'dataset.label_names' must be an array of strings");
    for (const auto& item : obj["label_names"])
      ds.label_names.push_back(require_string(item, "dataset.label_names entry"));
  }
  if (obj.contains("label_xml"))
    ds.label_xml = require_string(obj["label_xml"], "dataset.label_xml");
  return ds;
}

void apply_config_json(ExperimentConfig& config, const json& obj) {
  if (!obj.is_object()) throw ConfigError("config document must be a JSON object");
  reject_unknown_keys(obj,
                      {"dataset", "method", "sigma", "sigma_median", "epsilon",
                       "binary_prior", "energy", "ridge", "pair", "k", "smoothing",
                       "threshold", "standardize", "affinity_squared", "fuzzy_max_iters",
                       "fuzzy_tol", "hsic_max_sweeps", "seed", "output_path"},
                      "config");
  if (obj.contains("dataset")) config.dataset = parse_dataset(obj["dataset"]);
  if (obj.contains("method"))
    config.method = method_from_code(require_string(obj["method"], "method"));
  if (obj.contains("sigma")) config.sigma = require_number(obj["sigma"], "sigma");
  if (obj.contains("sigma_median"))
    config.sigma_median = require_boolean(obj["sigma_median"], "sigma_median");
  if (obj.contains("epsilon")) config.epsilon = require_number(obj["epsilon"], "epsilon");
  if (obj.contains("binary_prior"))
    config.binary_prior = require_number(obj["binary_prior"], "binary_prior");
  if (obj.contains("energy")) config.energy = require_number(obj["energy"], "energy");
  if (obj.contains("ridge")) {
    if (obj["ridge"].is_null())
      config.ridge.reset();
    else
      config.ridge = require_number(obj["ridge"], "ridge");
  }
  if (obj.contains("pair"))
    config.pair = scatter_pair_from_code(require_string(obj["pair"], "pair"));
  if (obj.contains("k")) config.k = static_cast<int>(require_integer(obj["k"], "k"));
  if (obj.contains("smoothing"))
    config.smoothing = require_number(obj["smoothing"], "smoothing");
  if (obj.contains("threshold"))
    config.threshold = require_number(obj["threshold"], "threshold");
  if (obj.contains("standardize"))
    config.standardize = require_boolean(obj["standardize"], "standardize");
  if (obj.contains("affinity_squared"))
    config.affinity_squared = require_boolean(obj["affinity_squared"], "affinity_squared");
  if (obj.contains("fuzzy_max_iters"))
    config.fuzzy_max_iters =
        static_cast<int>(require_integer(obj["fuzzy_max_iters"], "fuzzy_max_iters"));
  if (obj.contains("fuzzy_tol"))
    config.fuzzy_tol = require_number(obj["fuzzy_tol"], "fuzzy_tol");
  if (obj.contains("hsic_max_sweeps"))
    config.hsic_max_sweeps =
        static_cast<int>(require_integer(obj["hsic_max_sweeps"], "hsic_max_sweeps"));
  if (obj.contains("seed")) config.seed = require_integer(obj["seed"], "seed");
  if (obj.contains("output_path"))
    config.output_path = require_string(obj["output_path"], "output_path");
}

json parse_document(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
}

}  // namespace

Method method_from_code(const std::string& code) {
  for (Method m : kMethods)
    if (method_code(m) == code) return m;
  throw ConfigError("unknown method '" + code + "'");
}

std::string method_code(Method method) {
  switch (method) {
    case Method::swmlda_m: return "swmlda_m";
    case Method::swmlda_c: return "swmlda_c";
    case Method::swmlda_b: return "swmlda_b";
    case Method::swmlda_e: return "swmlda_e";
    case Method::swmlda_f: return "swmlda_f";
    case Method::swmlda_d: return "swmlda_d";
    case Method::wmlda_b: return "wmlda_b";
    case Method::wmlda_c: return "wmlda_c";
    case Method::wmlda_e: return "wmlda_e";
    case Method::wmlda_f: return "wmlda_f";
    case Method::wmlda_d: return "wmlda_d";
  }
  throw ConfigError("invalid method value");
}

bool method_is_saliency(Method method) {
  switch (method) {
    case Method::swmlda_m:
    case Method::swmlda_c:
    case Method::swmlda_b:
    case Method::swmlda_e:
    case Method::swmlda_f:
    case Method::swmlda_d:
      return true;
    default:
      return false;
  }
}

PriorForm method_prior_form(Method method) {
  switch (method) {
    case Method::swmlda_m: return PriorForm::misclassification;
    case Method::swmlda_c: return PriorForm::correlation;
    case Method::swmlda_b: return PriorForm::binary;
    case Method::swmlda_e: return PriorForm::entropy;
    case Method::swmlda_f: return PriorForm::fuzzy;
    case Method::swmlda_d: return PriorForm::dependence;
    default:
      throw ConfigError("method " + method_code(method) + " has no saliency prior form");
  }
}

BaselineForm method_baseline_form(Method method) {
  switch (method) {
    case Method::wmlda_b: return BaselineForm::binary;
    case Method::wmlda_c: return BaselineForm::correlation;
    case Method::wmlda_e: return BaselineForm::entropy;
    case Method::wmlda_f: return BaselineForm::fuzzy;
    case Method::wmlda_d: return BaselineForm::dependence;
    default:
      throw ConfigError("method " + method_code(method) + " is not a baseline weighting");
  }
}

void validate_config(const ExperimentConfig& config) {
  if (config.dataset.train_path.empty())
    throw ConfigError("dataset.train_path is required");
  if (config.dataset.format == DataFormat::arff) {
    const bool names = !config.dataset.label_names.empty();
    const bool xml = !config.dataset.label_xml.empty();
    if (names == xml)
      throw ConfigError("arff datasets need exactly one of dataset.label_names or "
                        "dataset.label_xml");
  } else if (!config.dataset.label_names.empty() || !config.dataset.label_xml.empty()) {
    throw ConfigError("label_names/label_xml only apply to arff datasets");
  }
  if (!(config.sigma > 0.0)) throw ConfigError("sigma must be positive");
  if (!(config.epsilon > 0.0)) throw ConfigError("epsilon must be positive");
  if (config.binary_prior < 0.0) throw ConfigError("binary_prior must be non-negative");
  if (!(config.energy > 0.0 && config.energy <= 1.0))
    throw ConfigError("energy must be in (0, 1]");
  if (config.ridge && *config.ridge < 0.0) throw ConfigError("ridge must be non-negative");
  if (config.k < 1) throw ConfigError("k must be at least 1");
  if (!(config.smoothing > 0.0)) throw ConfigError("smoothing must be positive");
  if (!(config.threshold >= 0.0 && config.threshold <= 1.0))
    throw ConfigError("threshold must be in [0, 1]");
  if (config.fuzzy_max_iters < 1) throw ConfigError("fuzzy_max_iters must be at least 1");
  if (!(config.fuzzy_tol > 0.0)) throw ConfigError("fuzzy_tol must be positive");
  if (config.hsic_max_sweeps < 1) throw ConfigError("hsic_max_sweeps must be at least 1");
}

ExperimentConfig parse_config_json(const std::string& text) {
  ExperimentConfig config;
  apply_config_json(config, parse_document(text));
  validate_config(config);
  return config;
}

ExperimentConfig load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config_json(buffer.str());
}

std::string config_to_json(const ExperimentConfig& config) {
  jsonw::Node dataset;
  dataset.str("name", dataset_display_name(config.dataset));
  dataset.str("train_path", config.dataset.train_path);
  dataset.str("test_path", config.dataset.test_path);
  dataset.str("format", config.dataset.format == DataFormat::csv ? "csv" : "arff");
  dataset.raw("label_names", jsonw::string_array(config.dataset.label_names));
  dataset.str("label_xml", config.dataset.label_xml);

  jsonw::Node root;
  root.raw("dataset", dataset.str());
  root.str("method", method_code(config.method));
  root.num("sigma", config.sigma);
  root.boolean("sigma_median", config.sigma_median);
  root.num("epsilon", config.epsilon);
  root.num("binary_prior", config.binary_prior);
  root.num("energy", config.energy);
  if (config.ridge)
    root.num("ridge", *config.ridge);
  else
    root.null("ridge");
  root.str("pair", scatter_pair_code(config.pair));
  root.integer("k", config.k);
  root.num("smoothing", config.smoothing);
  root.num("threshold", config.threshold);
  root.boolean("standardize", config.standardize);
  root.boolean("affinity_squared", config.affinity_squared);
  root.integer("fuzzy_max_iters", config.fuzzy_max_iters);
  root.num("fuzzy_tol", config.fuzzy_tol);
  root.integer("hsic_max_sweeps", config.hsic_max_sweeps);
  root.integer("seed", config.seed);
  root.str("output_path", config.output_path);
  return root.str();
}

std::vector<ExperimentConfig> parse_suite_json(const std::string& text) {
  const json doc = parse_document(text);
  std::vector<ExperimentConfig> configs;

  if (doc.is_array()) {
    for (const auto& item : doc) {
      ExperimentConfig config;
      apply_config_json(config, item);
      validate_config(config);
      configs.push_back(std::move(config));
    }
  } else if (doc.is_object() && (doc.contains("datasets") || doc.contains("methods"))) {
    reject_unknown_keys(doc, {"defaults", "datasets", "methods"}, "suite");
    ExperimentConfig defaults;
    if (doc.contains("defaults")) apply_config_json(defaults, doc["defaults"]);
    if (!doc.contains("datasets") || !doc["datasets"].is_array() || doc["datasets"].empty())
      throw ConfigError("suite needs a non-empty 'datasets' array");
    if (!doc.contains("methods") || !doc["methods"].is_array() || doc["methods"].empty())
      throw ConfigError("suite needs a non-empty 'methods' array");
    for (const auto& ds : doc["datasets"]) {
      const DatasetConfig dataset = parse_dataset(ds);
      for (const auto& m : doc["methods"]) {
        ExperimentConfig config = defaults;
        config.dataset = dataset;
        config.method = method_from_code(require_string(m, "methods entry"));
        validate_config(config);
        configs.push_back(std::move(config));
      }
    }
  } else {
    // A plain object is a single-run document; a one-cell suite is valid.
    ExperimentConfig config;
    apply_config_json(config, doc);
    validate_config(config);
    configs.push_back(std::move(config));
  }
  if (configs.empty()) throw ConfigError("suite document contains no experiments");
  return configs;
}

std::vector<ExperimentConfig> load_suite_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open suite file '" + path.string() + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_suite_json(buffer.str());
}

std::string dataset_display_name(const DatasetConfig& dataset) {
  if (!dataset.name.empty()) return dataset.name;
  return std::filesystem::path(dataset.train_path).stem().string();
}

MultiLabelDataset load_split(const DatasetConfig& dataset, SplitRole role) {
  const std::string& path =
      role == SplitRole::train ? dataset.train_path : dataset.test_path;
  if (path.empty())
    throw ConfigError(std::string("dataset.") +
                      (role == SplitRole::train ? "train_path" : "test_path") +
                      " is required");
  if (dataset.format == DataFormat::csv) return load_csv(path, role);
  std::vector<std::string> labels = dataset.label_names;
  if (labels.empty()) labels = read_label_xml(dataset.label_xml);
  return load_arff(path, labels, role);
}

}  // namespace swmlda
