#include "swmlda/dataset.hpp"

#include "swmlda/errors.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace swmlda {

std::vector<Eigen::Index> MultiLabelDataset::class_members(Eigen::Index c) const {
  if (c < 0 || c >= n_classes())
    throw DataError("class index " + std::to_string(c) + " out of range");
  std::vector<Eigen::Index> members;
  for (Eigen::Index i = 0; i < n_instances(); ++i)
    if (Y(c, i) > 0.5) members.push_back(i);
  return members;
}

namespace {

std::string strip_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_csv_row(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      cells.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  cells.push_back(cur);
  return cells;
}

double parse_feature_cell(const std::string& cell, size_t row, const std::string& column) {
  const std::string t = trim(cell);
  const char* begin = t.c_str();
  char* end = nullptr;
  errno = 0;
  double v = std::strtod(begin, &end);
  if (t.empty() || end != begin + t.size())
    throw DataError("parse error at data row " + std::to_string(row) + ", column '" +
                    column + "': '" + cell + "' is not a number");
  if (!std::isfinite(v))
    throw DataError("parse error at data row " + std::to_string(row) + ", column '" +
                    column + "': value is not finite");
  return v;
}

double parse_label_cell(const std::string& cell, size_t row, const std::string& column) {
  const std::string t = trim(cell);
  if (t == "0") return 0.0;
  if (t == "1") return 1.0;
  throw DataError("parse error at data row " + std::to_string(row) + ", column '" +
                  column + "': label cell '" + cell + "' is not 0 or 1");
}

}  // namespace

MultiLabelDataset load_csv(const std::filesystem::path& path, SplitRole role) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path.string() + "'");

  std::string header;
  if (!std::getline(in, header))
    throw DataError("format error in '" + path.string() + "': file is empty");
  header = strip_cr(header);
  // Drop a UTF-8 byte order mark if an exporting tool left one behind.
  if (header.rfind("\xEF\xBB\xBF", 0) == 0) header.erase(0, 3);

  struct Column {
    bool is_label;
    Eigen::Index slot;  // row in X or Y
    std::string name;
  };
  std::vector<Column> columns;
  std::vector<std::string> feature_names;
  std::vector<std::string> class_names;
  for (const std::string& raw : split_csv_row(header)) {
    const std::string cell = trim(raw);
    if (cell.rfind("f:", 0) == 0) {
      columns.push_back({false, static_cast<Eigen::Index>(feature_names.size()), cell.substr(2)});
      feature_names.push_back(cell.substr(2));
    } else if (cell.rfind("l:", 0) == 0) {
      columns.push_back({true, static_cast<Eigen::Index>(class_names.size()), cell.substr(2)});
      class_names.push_back(cell.substr(2));
    } else {
      throw DataError("format error in '" + path.string() + "': header column '" + cell +
                      "' lacks an f: or l: prefix");
    }
  }
  const auto d = static_cast<Eigen::Index>(feature_names.size());
  const auto c = static_cast<Eigen::Index>(class_names.size());

  std::vector<std::vector<double>> feature_rows;
  std::vector<std::vector<double>> label_rows;
  std::string line;
  size_t row_number = 0;
  while (std::getline(in, line)) {
    line = strip_cr(line);
    ++row_number;
    if (trim(line).empty()) continue;
    const std::vector<std::string> cells = split_csv_row(line);
    if (cells.size() != columns.size())
      throw DataError("parse error at data row " + std::to_string(row_number) + ": expected " +
                      std::to_string(columns.size()) + " cells, found " +
                      std::to_string(cells.size()));
    std::vector<double> f(static_cast<size_t>(d));
    std::vector<double> l(static_cast<size_t>(c));
    for (size_t j = 0; j < cells.size(); ++j) {
      const Column& col = columns[j];
      if (col.is_label)
        l[static_cast<size_t>(col.slot)] = parse_label_cell(cells[j], row_number, "l:" + col.name);
      else
        f[static_cast<size_t>(col.slot)] = parse_feature_cell(cells[j], row_number, "f:" + col.name);
    }
    feature_rows.push_back(std::move(f));
    label_rows.push_back(std::move(l));
  }

  const auto n = static_cast<Eigen::Index>(feature_rows.size());
  MultiLabelDataset ds;
  ds.X.resize(d, n);
  ds.Y.resize(c, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) ds.X(j, i) = feature_rows[i][j];
    for (Eigen::Index k = 0; k < c; ++k) ds.Y(k, i) = label_rows[i][k];
  }
  ds.feature_names = std::move(feature_names);
  ds.class_names = std::move(class_names);
  ds.role = role;
  return ds;
}

void save_csv(const MultiLabelDataset& ds, const std::filesystem::path& path) {
  if (ds.X.cols() != ds.Y.cols())
    throw DataError("dimension error: X has " + std::to_string(ds.X.cols()) +
                    " instances but Y has " + std::to_string(ds.Y.cols()));
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path.string() + "'");

  bool first = true;
  for (Eigen::Index j = 0; j < ds.n_features(); ++j) {
    const std::string name =
        j < static_cast<Eigen::Index>(ds.feature_names.size()) ? ds.feature_names[j] : "x" + std::to_string(j);
    out << (first ? "" : ",") << "f:" << name;
    first = false;
  }
  for (Eigen::Index k = 0; k < ds.n_classes(); ++k) {
    const std::string name =
        k < static_cast<Eigen::Index>(ds.class_names.size()) ? ds.class_names[k] : "y" + std::to_string(k);
    out << (first ? "" : ",") << "l:" << name;
    first = false;
  }
  out << "\n";

  char buf[64];
  for (Eigen::Index i = 0; i < ds.n_instances(); ++i) {
    bool first_cell = true;
    for (Eigen::Index j = 0; j < ds.n_features(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", ds.X(j, i));
      out << (first_cell ? "" : ",") << buf;
      first_cell = false;
    }
    for (Eigen::Index k = 0; k < ds.n_classes(); ++k) {
      out << (first_cell ? "" : ",") << (ds.Y(k, i) > 0.5 ? '1' : '0');
      first_cell = false;
    }
    out << "\n";
  }
  if (!out) throw DataError("write to '" + path.string() + "' failed");
}

StandardizationStats fit_standardizer(const MultiLabelDataset& train) {
  if (train.n_instances() == 0)
    throw DataError("cannot standardize an empty dataset");
  StandardizationStats stats;
  stats.mean = train.X.rowwise().mean();
  const Eigen::MatrixXd centred = train.X.colwise() - stats.mean;
  Eigen::VectorXd var = centred.array().square().rowwise().mean();
  stats.scale = var.array().sqrt();
  // A constant feature carries no information; unit scale leaves it centred
  // at zero instead of dividing by zero.
  for (Eigen::Index j = 0; j < stats.scale.size(); ++j)
    if (stats.scale(j) <= 0.0) stats.scale(j) = 1.0;
  return stats;
}

MultiLabelDataset apply_standardizer(const MultiLabelDataset& ds,
                                     const StandardizationStats& stats) {
  if (ds.n_features() != stats.mean.size() || ds.n_features() != stats.scale.size())
    throw DataError("dimension error: standardizer was fitted on " +
                    std::to_string(stats.mean.size()) + " features, dataset has " +
                    std::to_string(ds.n_features()));
  MultiLabelDataset out = ds;
  out.X = (ds.X.colwise() - stats.mean).array().colwise() / stats.scale.array();
  return out;
}

}  // namespace swmlda
