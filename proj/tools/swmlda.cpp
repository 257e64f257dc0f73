// Command line driver: run single experiments, train/evaluate persisted
// models, sweep dataset x method suites, dump weight matrices, and fetch the
// benchmark archives.

#include "swmlda/config.hpp"
#include "swmlda/errors.hpp"
#include "swmlda/experiment.hpp"
#include "swmlda/version.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace swmlda;

namespace {

// Storage plus option handles for the flags shared by the config-driven
// subcommands.  Each handle lets us tell "flag given" from "default value",
// so explicit flags override the config file which overrides the defaults.
struct ConfigArgs {
  std::string config_file;

  std::string train, test, name, label_xml;
  std::string format;
  std::vector<std::string> labels;

  std::string method, pair;
  double sigma = 0, epsilon = 0, binary_prior = 0, energy = 0, ridge = 0;
  double smoothing = 0, threshold = 0, fuzzy_tol = 0;
  int k = 0, fuzzy_max_iters = 0, hsic_max_sweeps = 0;
  long long seed = 0;
  bool standardize = true, affinity_squared = false;
  std::string output;

  CLI::Option* o_train = nullptr;
  CLI::Option* o_test = nullptr;
  CLI::Option* o_name = nullptr;
  CLI::Option* o_label_xml = nullptr;
  CLI::Option* o_format = nullptr;
  CLI::Option* o_labels = nullptr;
  CLI::Option* o_method = nullptr;
  CLI::Option* o_pair = nullptr;
  CLI::Option* o_sigma = nullptr;
  CLI::Option* o_sigma_median = nullptr;
  CLI::Option* o_epsilon = nullptr;
  CLI::Option* o_binary_prior = nullptr;
  CLI::Option* o_energy = nullptr;
  CLI::Option* o_ridge = nullptr;
  CLI::Option* o_k = nullptr;
  CLI::Option* o_smoothing = nullptr;
  CLI::Option* o_threshold = nullptr;
  CLI::Option* o_standardize = nullptr;
  CLI::Option* o_affinity_squared = nullptr;
  CLI::Option* o_fuzzy_max_iters = nullptr;
  CLI::Option* o_fuzzy_tol = nullptr;
  CLI::Option* o_hsic_max_sweeps = nullptr;
  CLI::Option* o_seed = nullptr;
  CLI::Option* o_output = nullptr;
};

void add_dataset_flags(CLI::App* cmd, ConfigArgs& a) {
  cmd->add_option("--config", a.config_file, "JSON experiment config")->check(CLI::ExistingFile);
  a.o_train = cmd->add_option("--train", a.train, "training split path");
  a.o_test = cmd->add_option("--test", a.test, "test split path");
  a.o_name = cmd->add_option("--name", a.name, "dataset name used in reports");
  a.o_format = cmd->add_option("--format", a.format, "data format: csv or arff")
                   ->check(CLI::IsMember({"csv", "arff"}));
  a.o_labels = cmd->add_option("--labels", a.labels, "comma separated label attribute names (arff)")
                   ->delimiter(',');
  a.o_label_xml = cmd->add_option("--label-xml", a.label_xml, "label list XML companion (arff)");
}

void add_method_flags(CLI::App* cmd, ConfigArgs& a) {
  a.o_method = cmd->add_option(
      "--method", a.method,
      "swmlda_{m,c,b,e,f,d} or wmlda_{b,c,e,f,d}");
  a.o_sigma = cmd->add_option("--sigma", a.sigma, "heat kernel bandwidth");
  a.o_sigma_median = cmd->add_flag("--sigma-median,!--no-sigma-median",
                                   "per-class median pairwise distance as bandwidth");
  a.o_epsilon = cmd->add_option("--epsilon", a.epsilon, "saliency system regularizer");
  a.o_binary_prior = cmd->add_option("--binary-prior", a.binary_prior,
                                     "constant anchor strength of the binary prior");
  a.o_energy = cmd->add_option("--energy", a.energy, "eigenvalue energy kept by the projection");
  a.o_ridge = cmd->add_option("--ridge", a.ridge, "scatter ridge (default: trace scaled)");
  a.o_pair = cmd->add_option("--pair", a.pair, "scatter pair: b_over_t or b_over_w")
                 ->check(CLI::IsMember({"b_over_t", "b_over_w"}));
  a.o_k = cmd->add_option("--k", a.k, "neighbor count");
  a.o_smoothing = cmd->add_option("--smoothing", a.smoothing, "Bayesian smoothing strength");
  a.o_threshold = cmd->add_option("--threshold", a.threshold, "label decision threshold");
  a.o_standardize = cmd->add_flag("--standardize,!--no-standardize",
                                  a.standardize, "z-score features with training statistics");
  a.o_affinity_squared = cmd->add_flag("--affinity-squared,!--no-affinity-squared",
                                       a.affinity_squared, "squared distances in the heat kernel");
  a.o_fuzzy_max_iters = cmd->add_option("--fuzzy-max-iters", a.fuzzy_max_iters,
                                        "fuzzy membership iteration cap");
  a.o_fuzzy_tol = cmd->add_option("--fuzzy-tol", a.fuzzy_tol, "fuzzy membership tolerance");
  a.o_hsic_max_sweeps = cmd->add_option("--hsic-max-sweeps", a.hsic_max_sweeps,
                                        "dependence assignment sweep cap");
  a.o_seed = cmd->add_option("--seed", a.seed, "random seed (reserved)");
}

// Layering: built-in defaults, then the config file, then explicit flags.
ExperimentConfig resolve_config(const ConfigArgs& a) {
  ExperimentConfig cfg;
  if (!a.config_file.empty()) cfg = load_config_file(a.config_file);

  if (a.o_train && a.o_train->count()) cfg.dataset.train_path = a.train;
  if (a.o_test && a.o_test->count()) cfg.dataset.test_path = a.test;
  if (a.o_name && a.o_name->count()) cfg.dataset.name = a.name;
  if (a.o_format && a.o_format->count())
    cfg.dataset.format = a.format == "arff" ? DataFormat::arff : DataFormat::csv;
  if (a.o_labels && a.o_labels->count()) cfg.dataset.label_names = a.labels;
  if (a.o_label_xml && a.o_label_xml->count()) cfg.dataset.label_xml = a.label_xml;

  if (a.o_method && a.o_method->count()) cfg.method = method_from_code(a.method);
  if (a.o_sigma && a.o_sigma->count()) cfg.sigma = a.sigma;
  if (a.o_sigma_median && a.o_sigma_median->count())
    cfg.sigma_median = a.o_sigma_median->as<bool>();
  if (a.o_epsilon && a.o_epsilon->count()) cfg.epsilon = a.epsilon;
  if (a.o_binary_prior && a.o_binary_prior->count()) cfg.binary_prior = a.binary_prior;
  if (a.o_energy && a.o_energy->count()) cfg.energy = a.energy;
  if (a.o_ridge && a.o_ridge->count()) cfg.ridge = a.ridge;
  if (a.o_pair && a.o_pair->count()) cfg.pair = scatter_pair_from_code(a.pair);
  if (a.o_k && a.o_k->count()) cfg.k = a.k;
  if (a.o_smoothing && a.o_smoothing->count()) cfg.smoothing = a.smoothing;
  if (a.o_threshold && a.o_threshold->count()) cfg.threshold = a.threshold;
  if (a.o_standardize && a.o_standardize->count()) cfg.standardize = a.standardize;
  if (a.o_affinity_squared && a.o_affinity_squared->count())
    cfg.affinity_squared = a.affinity_squared;
  if (a.o_fuzzy_max_iters && a.o_fuzzy_max_iters->count())
    cfg.fuzzy_max_iters = a.fuzzy_max_iters;
  if (a.o_fuzzy_tol && a.o_fuzzy_tol->count()) cfg.fuzzy_tol = a.fuzzy_tol;
  if (a.o_hsic_max_sweeps && a.o_hsic_max_sweeps->count())
    cfg.hsic_max_sweeps = a.hsic_max_sweeps;
  if (a.o_seed && a.o_seed->count()) cfg.seed = a.seed;
  if (a.o_output && a.o_output->count()) cfg.output_path = a.output;

  return cfg;
}

void print_metrics(const MetricsReport& m) {
  std::printf("  one_error     %.4f\n", m.one_error);
  std::printf("  coverage      %.4f\n", m.coverage);
  std::printf("  ranking_loss  %.4f\n", m.ranking_loss);
  std::printf("  hamming_loss  %.4f\n", m.hamming_loss);
  std::printf("  macro_f1      %.4f\n", m.macro_f1);
  if (m.skipped_one_error || m.skipped_coverage || m.skipped_ranking_loss)
    std::printf("  skipped: one_error %lld, coverage %lld, ranking_loss %lld\n",
                static_cast<long long>(m.skipped_one_error),
                static_cast<long long>(m.skipped_coverage),
                static_cast<long long>(m.skipped_ranking_loss));
}

void print_warnings(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
}

int cmd_run(const ConfigArgs& args) {
  ExperimentConfig cfg = resolve_config(args);
  validate_config(cfg);
  RunRecord record = run_experiment(cfg);

  std::printf("%s / %s\n", dataset_display_name(cfg.dataset).c_str(),
              method_code(cfg.method).c_str());
  print_metrics(record.metrics);
  std::printf("  projection dim %lld, ridge %.3g\n",
              static_cast<long long>(record.selected_dim), record.ridge);
  for (const auto& [stage, ms] : record.timings_ms)
    std::printf("  %-12s %8.1f ms\n", stage.c_str(), ms);
  if (!cfg.output_path.empty())
    std::printf("outputs written to %s\n", cfg.output_path.c_str());
  print_warnings(record.warnings);
  return kExitOk;
}

int cmd_train(const ConfigArgs& args, const std::string& save_path) {
  ExperimentConfig cfg = resolve_config(args);
  validate_config(cfg);
  TrainedModel model = train_model(cfg);
  save_model(model, save_path);
  std::printf("trained %s on %s: %lld classes, projection dim %lld\n",
              method_code(cfg.method).c_str(), dataset_display_name(cfg.dataset).c_str(),
              static_cast<long long>(model.class_names.size()),
              static_cast<long long>(model.projection.W.cols()));
  std::printf("model saved to %s\n", save_path.c_str());
  print_warnings(model.warnings);
  return kExitOk;
}

int cmd_eval(const ConfigArgs& args, const std::string& load_path) {
  TrainedModel model = load_model(load_path);

  // The test split comes from the flags / config file when given, otherwise
  // from the dataset the model was trained on.
  DatasetConfig dataset = model.config.dataset;
  if (!args.config_file.empty()) dataset = load_config_file(args.config_file).dataset;
  if (args.o_train && args.o_train->count()) dataset.train_path = args.train;
  if (args.o_test && args.o_test->count()) dataset.test_path = args.test;
  if (args.o_name && args.o_name->count()) dataset.name = args.name;
  if (args.o_format && args.o_format->count())
    dataset.format = args.format == "arff" ? DataFormat::arff : DataFormat::csv;
  if (args.o_labels && args.o_labels->count()) dataset.label_names = args.labels;
  if (args.o_label_xml && args.o_label_xml->count()) dataset.label_xml = args.label_xml;
  if (dataset.test_path.empty())
    throw ConfigError("eval needs a test split: pass --test or a config with dataset.test");

  MultiLabelDataset test = load_split(dataset, SplitRole::test);
  MetricsReport metrics = eval_model(model, test);

  std::printf("%s / %s\n", dataset_display_name(dataset).c_str(),
              method_code(model.config.method).c_str());
  print_metrics(metrics);

  if (args.o_output && args.o_output->count()) {
    fs::create_directories(args.output);
    save_metrics_csv(dataset_display_name(dataset), method_code(model.config.method), metrics,
                     fs::path(args.output) / "metrics.csv");
    std::printf("outputs written to %s\n", args.output.c_str());
  }
  return kExitOk;
}

int cmd_suite(const std::string& config_file, const std::string& output_dir, int jobs) {
  std::vector<ExperimentConfig> configs = load_suite_file(config_file);
  std::printf("suite: %lld cells, %d job%s\n", static_cast<long long>(configs.size()), jobs,
              jobs == 1 ? "" : "s");
  SuiteResult result = run_suite(configs, output_dir, jobs);

  int failed = 0;
  for (const auto& cell : result.cells) {
    if (cell.ok) {
      std::printf("[ ok ] %s / %s  one_error=%.4f hamming=%.4f macro_f1=%.4f\n",
                  cell.dataset.c_str(), cell.method.c_str(), cell.record.metrics.one_error,
                  cell.record.metrics.hamming_loss, cell.record.metrics.macro_f1);
    } else {
      ++failed;
      std::printf("[fail] %s / %s  %s\n", cell.dataset.c_str(), cell.method.c_str(),
                  cell.error.c_str());
    }
  }
  std::printf("suite done: %lld cells, %d failed; reports in %s\n",
              static_cast<long long>(result.cells.size()), failed, output_dir.c_str());
  return kExitOk;
}

int cmd_weights_dump(const ConfigArgs& args, const std::string& output_dir) {
  ExperimentConfig cfg = resolve_config(args);
  validate_config(cfg);
  dump_weights(cfg, output_dir);
  std::printf("weight matrix written to %s\n", output_dir.c_str());
  return kExitOk;
}

fs::path executable_dir() {
  std::error_code ec;
  fs::path exe = fs::read_symlink("/proc/self/exe", ec);
  if (ec) return fs::current_path();
  return exe.parent_path();
}

fs::path find_fetch_script() {
  if (const char* env = std::getenv("SWMLDA_FETCH_SCRIPT"); env && *env) return env;
  const fs::path exe_dir = executable_dir();
  for (const fs::path& candidate : {
           exe_dir / "fetch_datasets.sh",
           exe_dir / ".." / "share" / "swmlda" / "fetch_datasets.sh",
           fs::path(SWMLDA_TOOLS_DIR) / "fetch_datasets.sh",
       }) {
    if (fs::exists(candidate)) return candidate;
  }
  throw ConfigError("fetch_datasets.sh not found next to the binary, under ../share/swmlda, "
                    "or via SWMLDA_FETCH_SCRIPT");
}

int cmd_fetch(const std::string& data_dir, bool list_only) {
  const fs::path script = find_fetch_script();
  std::string command = "bash '" + script.string() + "'";
  if (list_only)
    command += " --list";
  else
    command += " --data-dir '" + data_dir + "'";
  const int status = std::system(command.c_str());
  if (status < 0) throw Error("failed to launch " + script.string());
  return WIFEXITED(status) ? WEXITSTATUS(status) : kExitInternal;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"saliency-weighted multi-label discriminant analysis"};
  app.set_version_flag("--version", std::string("swmlda ") + kVersion);
  app.require_subcommand(1);

  ConfigArgs run_args;
  CLI::App* run = app.add_subcommand("run", "run one experiment end to end");
  add_dataset_flags(run, run_args);
  add_method_flags(run, run_args);
  run_args.o_output = run->add_option("--output", run_args.output, "directory for run outputs");

  ConfigArgs train_args;
  std::string save_path;
  CLI::App* train = app.add_subcommand("train", "fit a model and save it");
  add_dataset_flags(train, train_args);
  add_method_flags(train, train_args);
  train->add_option("--save", save_path, "model output path")->required();

  ConfigArgs eval_args;
  std::string load_path;
  CLI::App* eval = app.add_subcommand("eval", "score a saved model on a test split");
  add_dataset_flags(eval, eval_args);
  eval->add_option("--load", load_path, "model file to load")->required()
      ->check(CLI::ExistingFile);
  eval_args.o_output = eval->add_option("--output", eval_args.output,
                                        "directory for the metrics report");

  std::string suite_config, suite_output;
  int suite_jobs = 1;
  CLI::App* suite = app.add_subcommand("suite", "run a dataset x method grid");
  suite->add_option("--config", suite_config, "suite JSON (config array or grid)")
      ->required()->check(CLI::ExistingFile);
  suite->add_option("--output", suite_output, "directory for cell outputs and tables")
      ->required();
  suite->add_option("--jobs", suite_jobs, "parallel worker count")
      ->check(CLI::PositiveNumber);

  CLI::App* weights = app.add_subcommand("weights", "weight matrix utilities");
  weights->require_subcommand(1);
  ConfigArgs dump_args;
  std::string dump_output;
  CLI::App* dump = weights->add_subcommand("dump", "write the weight matrix and residuals");
  add_dataset_flags(dump, dump_args);
  add_method_flags(dump, dump_args);
  dump->add_option("--output", dump_output, "directory for weights.csv and sidecars")
      ->required();

  std::string fetch_dir = "data";
  bool fetch_list = false;
  CLI::App* fetch = app.add_subcommand("fetch-datasets", "download the benchmark archives");
  fetch->add_option("--data-dir", fetch_dir, "target directory (default: ./data)");
  fetch->add_flag("--list", fetch_list, "list datasets and sources without downloading");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (run->parsed()) return cmd_run(run_args);
    if (train->parsed()) return cmd_train(train_args, save_path);
    if (eval->parsed()) return cmd_eval(eval_args, load_path);
    if (suite->parsed()) return cmd_suite(suite_config, suite_output, suite_jobs);
    if (weights->parsed() && dump->parsed()) return cmd_weights_dump(dump_args, dump_output);
    if (fetch->parsed()) return cmd_fetch(fetch_dir, fetch_list);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_code_for(e);
  }
  return kExitInternal;
}
