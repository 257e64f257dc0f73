#include "swmlda/errors.hpp"
#include "swmlda/experiment.hpp"
#include "swmlda/version.hpp"
#include "json_writer.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>
#include <string>

namespace swmlda {

namespace {

using nlohmann::json;

std::string stats_json(const StandardizationStats& stats) {
  jsonw::Node node;
  node.raw("mean", jsonw::vector_array(stats.mean));
  node.raw("scale", jsonw::vector_array(stats.scale));
  return node.str();
}

std::string projection_json(const Projection& proj) {
  jsonw::Node node;
  node.raw("W", jsonw::matrix_object(proj.W));
  node.raw("eigenvalues", jsonw::vector_array(proj.eigenvalues));
  node.num("energy_threshold", proj.energy_threshold);
  node.num("ridge", proj.ridge);
  return node.str();
}

std::string classifier_json(const MlknnModel& model) {
  jsonw::Node node;
  node.integer("k", model.k);
  node.num("smoothing", model.smoothing);
  node.raw("Z_train", jsonw::matrix_object(model.Z_train));
  node.raw("Y_train", jsonw::matrix_object(model.Y_train));
  node.raw("prior", jsonw::vector_array(model.prior));
  node.raw("prior_neg", jsonw::vector_array(model.prior_neg));
  node.raw("cond", jsonw::matrix_object(model.cond));
  node.raw("cond_neg", jsonw::matrix_object(model.cond_neg));
  return node.str();
}

const json& need(const json& obj, const char* key, const char* where) {
  auto it = obj.find(key);
  if (it == obj.end())
    throw DataError("model file is missing '" + std::string(key) + "' in " + where);
  return *it;
}

Eigen::VectorXd read_vector(const json& arr, const char* where) {
  if (!arr.is_array()) throw DataError("model file: " + std::string(where) + " must be an array");
  Eigen::VectorXd v(static_cast<Eigen::Index>(arr.size()));
  Eigen::Index i = 0;
  for (const auto& item : arr) {
    if (!item.is_number()) throw DataError("model file: non-numeric entry in " + std::string(where));
    v(i++) = item.get<double>();
  }
  return v;
}

Eigen::MatrixXd read_matrix(const json& obj, const char* where) {
  if (!obj.is_object()) throw DataError("model file: " + std::string(where) + " must be an object");
  const auto rows = need(obj, "rows", where).get<Eigen::Index>();
  const auto cols = need(obj, "cols", where).get<Eigen::Index>();
  const json& data = need(obj, "data", where);
  if (rows < 0 || cols < 0 || !data.is_array() ||
      static_cast<Eigen::Index>(data.size()) != rows * cols)
    throw DataError("model file: inconsistent matrix shape in " + std::string(where));
  Eigen::MatrixXd m(rows, cols);
  Eigen::Index at = 0;
  for (const auto& item : data) {
    if (!item.is_number()) throw DataError("model file: non-numeric entry in " + std::string(where));
    m(at % rows, at / rows) = item.get<double>();
    ++at;
  }
  return m;
}

std::vector<std::string> read_strings(const json& arr, const char* where) {
  if (!arr.is_array()) throw DataError("model file: " + std::string(where) + " must be an array");
  std::vector<std::string> out;
  for (const auto& item : arr) {
    if (!item.is_string()) throw DataError("model file: non-string entry in " + std::string(where));
    out.push_back(item.get<std::string>());
  }
  return out;
}

}  // namespace

void save_model(const TrainedModel& model, const std::filesystem::path& path) {
  jsonw::Node root;
  root.str("artifact_version", model.artifact_version);
  root.raw("config", config_to_json(model.config));
  root.boolean("standardized", model.standardized);
  if (model.standardized)
    root.raw("standardizer", stats_json(model.stats));
  else
    root.null("standardizer");
  root.raw("projection", projection_json(model.projection));
  root.raw("classifier", classifier_json(model.classifier));
  root.raw("class_names", jsonw::string_array(model.class_names));
  root.raw("warnings", jsonw::string_array(model.warnings));

  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write model file '" + path.string() + "'");
  out << root.str() << "\n";
  if (!out) throw DataError("write to model file '" + path.string() + "' failed");
}

TrainedModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open model file '" + path.string() + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();

  json doc;
  try {
    doc = json::parse(buffer.str());
  } catch (const json::parse_error& e) {
    throw DataError("model file '" + path.string() + "' is not valid JSON: " + e.what());
  }
  if (!doc.is_object()) throw DataError("model file '" + path.string() + "' is not an object");

  TrainedModel model;
  model.artifact_version = need(doc, "artifact_version", "model").get<std::string>();
  const std::string major = model.artifact_version.substr(0, model.artifact_version.find('.'));
  const std::string current(kVersion);
  if (major != current.substr(0, current.find('.')))
    throw DataError("model file version " + model.artifact_version +
                    " is incompatible with this build (" + current + ")");

  model.config = parse_config_json(need(doc, "config", "model").dump());
  model.standardized = need(doc, "standardized", "model").get<bool>();
  if (model.standardized) {
    const json& stats = need(doc, "standardizer", "model");
    model.stats.mean = read_vector(need(stats, "mean", "standardizer"), "standardizer.mean");
    model.stats.scale = read_vector(need(stats, "scale", "standardizer"), "standardizer.scale");
    if (model.stats.mean.size() != model.stats.scale.size())
      throw DataError("model file: standardizer mean/scale lengths differ");
  }

  const json& proj = need(doc, "projection", "model");
  model.projection.W = read_matrix(need(proj, "W", "projection"), "projection.W");
  model.projection.eigenvalues =
      read_vector(need(proj, "eigenvalues", "projection"), "projection.eigenvalues");
  model.projection.energy_threshold =
      need(proj, "energy_threshold", "projection").get<double>();
  model.projection.ridge = need(proj, "ridge", "projection").get<double>();

  const json& cls = need(doc, "classifier", "model");
  model.classifier.k = need(cls, "k", "classifier").get<int>();
  model.classifier.smoothing = need(cls, "smoothing", "classifier").get<double>();
  model.classifier.Z_train = read_matrix(need(cls, "Z_train", "classifier"), "classifier.Z_train");
  model.classifier.Y_train = read_matrix(need(cls, "Y_train", "classifier"), "classifier.Y_train");
  model.classifier.prior = read_vector(need(cls, "prior", "classifier"), "classifier.prior");
  model.classifier.prior_neg =
      read_vector(need(cls, "prior_neg", "classifier"), "classifier.prior_neg");
  model.classifier.cond = read_matrix(need(cls, "cond", "classifier"), "classifier.cond");
  model.classifier.cond_neg =
      read_matrix(need(cls, "cond_neg", "classifier"), "classifier.cond_neg");

  model.class_names = read_strings(need(doc, "class_names", "model"), "class_names");
  model.warnings = read_strings(need(doc, "warnings", "model"), "warnings");

  if (model.classifier.Z_train.cols() != model.classifier.Y_train.cols())
    throw DataError("model file: classifier matrices disagree on instance count");
  if (model.projection.W.cols() != model.classifier.Z_train.rows())
    throw DataError("model file: projection and classifier disagree on dimension");
  return model;
}

}  // namespace swmlda
