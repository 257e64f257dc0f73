#include "swmlda/dataset.hpp"
#include "swmlda/errors.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <unordered_map>

namespace swmlda {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  return s;
}

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string unquote(const std::string& s) {
  if (s.size() >= 2 && ((s.front() == '\'' && s.back() == '\'') ||
                        (s.front() == '"' && s.back() == '"')))
    return s.substr(1, s.size() - 2);
  return s;
}

struct ParseContext {
  std::string file;
  size_t line_number = 0;

  [[noreturn]] void fail(const std::string& what) const {
    throw DataError("parse error in '" + file + "' line " + std::to_string(line_number) +
                    ": " + what);
  }
};

/// An attribute name, possibly quoted, followed by its type declaration.
struct AttributeDecl {
  std::string name;
  bool binary_nominal;  // {0,1} nominal; otherwise numeric
};

AttributeDecl parse_attribute(const std::string& rest, const ParseContext& ctx) {
  std::string s = trim(rest);
  if (s.empty()) ctx.fail("@attribute without a name");

  std::string name;
  size_t pos = 0;
  if (s[0] == '\'' || s[0] == '"') {
    const char quote = s[0];
    size_t end = s.find(quote, 1);
    if (end == std::string::npos) ctx.fail("unterminated quoted attribute name");
    name = s.substr(1, end - 1);
    pos = end + 1;
  } else {
    size_t end = s.find_first_of(" \t");
    if (end == std::string::npos) ctx.fail("@attribute '" + s + "' has no type");
    name = s.substr(0, end);
    pos = end;
  }
  std::string type = trim(s.substr(pos));
  if (type.empty()) ctx.fail("attribute '" + name + "' has no type");

  if (type[0] == '{') {
    if (type.back() != '}') ctx.fail("attribute '" + name + "': unterminated nominal domain");
    std::vector<std::string> values;
    std::stringstream domain(type.substr(1, type.size() - 2));
    std::string item;
    while (std::getline(domain, item, ',')) values.push_back(unquote(trim(item)));
    std::sort(values.begin(), values.end());
    if (values != std::vector<std::string>{"0", "1"})
      ctx.fail("attribute '" + name + "': only {0,1} nominal domains are supported");
    return {name, true};
  }
  const std::string t = lower(type);
  if (t == "numeric" || t == "real" || t == "integer") return {name, false};
  ctx.fail("attribute '" + name + "' has unsupported type '" + type + "'");
}

double parse_value(const std::string& raw, bool binary_nominal, const std::string& attr,
                   const ParseContext& ctx) {
  const std::string cell = unquote(trim(raw));
  if (cell == "?") ctx.fail("attribute '" + attr + "' has a missing value");
  if (binary_nominal) {
    if (cell == "0") return 0.0;
    if (cell == "1") return 1.0;
    ctx.fail("attribute '" + attr + "': '" + cell + "' is not in {0,1}");
  }
  const char* begin = cell.c_str();
  char* end = nullptr;
  errno = 0;
  double v = std::strtod(begin, &end);
  if (cell.empty() || end != begin + cell.size())
    ctx.fail("attribute '" + attr + "': '" + cell + "' is not a number");
  if (!std::isfinite(v)) ctx.fail("attribute '" + attr + "': value is not finite");
  return v;
}

}  // namespace

MultiLabelDataset load_arff(const std::filesystem::path& path,
                            const std::vector<std::string>& label_names,
                            SplitRole role) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path.string() + "'");

  ParseContext ctx{path.string(), 0};
  std::vector<AttributeDecl> attributes;
  bool in_data = false;
  std::vector<std::vector<double>> rows;

  std::string line;
  while (std::getline(in, line)) {
    ++ctx.line_number;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '%') continue;

    if (!in_data) {
      const std::string lt = lower(t);
      if (lt.rfind("@relation", 0) == 0) continue;
      if (lt.rfind("@attribute", 0) == 0) {
        attributes.push_back(parse_attribute(t.substr(10), ctx));
        continue;
      }
      if (lt.rfind("@data", 0) == 0) {
        if (attributes.empty()) ctx.fail("@data before any @attribute");
        in_data = true;
        continue;
      }
      ctx.fail("unrecognized header line '" + t + "'");
    }

    std::vector<double> row(attributes.size(), 0.0);
    if (t[0] == '{') {
      // Sparse row: {index value, index value, ...}; omitted entries are zero.
      if (t.back() != '}') ctx.fail("unterminated sparse row");
      const std::string body = trim(t.substr(1, t.size() - 2));
      if (!body.empty()) {
        std::stringstream entries(body);
        std::string entry;
        while (std::getline(entries, entry, ',')) {
          std::stringstream pair(trim(entry));
          long long index = -1;
          std::string value;
          if (!(pair >> index)) ctx.fail("sparse entry '" + entry + "' has no index");
          std::getline(pair, value);
          if (index < 0 || index >= static_cast<long long>(attributes.size()))
            ctx.fail("sparse index " + std::to_string(index) + " out of range");
          const AttributeDecl& attr = attributes[static_cast<size_t>(index)];
          row[static_cast<size_t>(index)] =
              parse_value(value, attr.binary_nominal, attr.name, ctx);
        }
      }
    } else {
      std::vector<std::string> cells;
      std::string cell;
      std::stringstream ss(t);
      while (std::getline(ss, cell, ',')) cells.push_back(cell);
      if (cells.size() != attributes.size())
        ctx.fail("expected " + std::to_string(attributes.size()) + " values, found " +
                 std::to_string(cells.size()));
      for (size_t j = 0; j < cells.size(); ++j)
        row[j] = parse_value(cells[j], attributes[j].binary_nominal, attributes[j].name, ctx);
    }
    rows.push_back(std::move(row));
  }
  if (!in_data) throw DataError("format error in '" + path.string() + "': no @data section");

  // Split attributes into labels (matched by name, in label_names order) and
  // features (everything else, in header order).
  std::unordered_map<std::string, size_t> attr_index;
  for (size_t j = 0; j < attributes.size(); ++j) attr_index[attributes[j].name] = j;

  std::vector<size_t> label_slots;
  std::vector<bool> is_label(attributes.size(), false);
  for (const std::string& name : label_names) {
    auto it = attr_index.find(name);
    if (it == attr_index.end())
      throw ConfigError("label attribute '" + name + "' not declared in '" + path.string() + "'");
    if (is_label[it->second])
      throw ConfigError("label '" + name + "' listed twice");
    is_label[it->second] = true;
    label_slots.push_back(it->second);
  }

  std::vector<size_t> feature_slots;
  std::vector<std::string> feature_names;
  for (size_t j = 0; j < attributes.size(); ++j) {
    if (!is_label[j]) {
      feature_slots.push_back(j);
      feature_names.push_back(attributes[j].name);
    }
  }

  const auto n = static_cast<Eigen::Index>(rows.size());
  const auto d = static_cast<Eigen::Index>(feature_slots.size());
  const auto c = static_cast<Eigen::Index>(label_slots.size());
  MultiLabelDataset ds;
  ds.X.resize(d, n);
  ds.Y.resize(c, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const std::vector<double>& row = rows[static_cast<size_t>(i)];
    for (Eigen::Index j = 0; j < d; ++j) ds.X(j, i) = row[feature_slots[static_cast<size_t>(j)]];
    for (Eigen::Index k = 0; k < c; ++k) {
      const double v = row[label_slots[static_cast<size_t>(k)]];
      if (v != 0.0 && v != 1.0)
        throw DataError("parse error in '" + path.string() + "': label '" +
                        label_names[static_cast<size_t>(k)] + "' has non-binary value");
      ds.Y(k, i) = v;
    }
  }
  ds.feature_names = std::move(feature_names);
  ds.class_names = label_names;
  ds.role = role;
  return ds;
}

std::vector<std::string> read_label_xml(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();

  // The companion files are flat lists of <label name="..."/> elements; a
  // lightweight scan is enough and avoids an XML library dependency.
  std::vector<std::string> names;
  size_t pos = 0;
  while ((pos = text.find("<label", pos)) != std::string::npos) {
    size_t close = text.find('>', pos);
    if (close == std::string::npos) break;
    const std::string element = text.substr(pos, close - pos);
    size_t name_at = element.find("name=");
    if (name_at != std::string::npos && name_at + 5 < element.size()) {
      const char quote = element[name_at + 5];
      if (quote == '"' || quote == '\'') {
        size_t end = element.find(quote, name_at + 6);
        if (end != std::string::npos) {
          std::string name = element.substr(name_at + 6, end - name_at - 6);
          // Undo the handful of XML entities that can appear in names.
          const std::pair<const char*, const char*> entities[] = {
              {"&amp;", "&"}, {"&lt;", "<"}, {"&gt;", ">"}, {"&quot;", "\""}, {"&apos;", "'"}};
          for (const auto& [from, to] : entities) {
            size_t at = 0;
            while ((at = name.find(from, at)) != std::string::npos)
              name.replace(at, std::string(from).size(), to);
          }
          names.push_back(name);
        }
      }
    }
    pos = close + 1;
  }
  if (names.empty())
    throw DataError("format error in '" + path.string() + "': no label declarations found");
  return names;
}

}  // namespace swmlda
