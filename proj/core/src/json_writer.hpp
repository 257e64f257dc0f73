#pragma once

// Minimal append-style JSON emitter used for config snapshots, run records,
// and model files.  Doubles are always written with 17 significant digits so
// that serialized values parse back to the identical bits and identical
// inputs yield byte-identical files.

#include <Eigen/Core>

#include <cstdio>
#include <string>
#include <vector>

namespace swmlda::jsonw {

inline std::string escape(const std::string& s) {
  std::string out;
  out.reserve(s.size() + 2);
  for (char ch : s) {
    switch (ch) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(ch) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", ch);
          out += buf;
        } else {
          out += ch;
        }
    }
  }
  return out;
}

inline std::string number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string quoted(const std::string& s) { return "\"" + escape(s) + "\""; }

/// Builds one JSON object or array level; values are appended pre-encoded.
class Node {
public:
  explicit Node(bool array = false) : array_(array) {}

  void raw(const std::string& key, const std::string& encoded) {
    items_.push_back(array_ ? encoded : quoted(key) + ":" + encoded);
  }
  void str(const std::string& key, const std::string& value) { raw(key, quoted(value)); }
  void num(const std::string& key, double value) { raw(key, number(value)); }
  void integer(const std::string& key, long long value) { raw(key, std::to_string(value)); }
  void boolean(const std::string& key, bool value) { raw(key, value ? "true" : "false"); }
  void null(const std::string& key) { raw(key, "null"); }

  void push(const std::string& encoded) { items_.push_back(encoded); }

  std::string str() const {
    std::string out(1, array_ ? '[' : '{');
    for (size_t i = 0; i < items_.size(); ++i) {
      if (i) out += ",";
      out += items_[i];
    }
    out += array_ ? ']' : '}';
    return out;
  }

private:
  bool array_;
  std::vector<std::string> items_;
};

inline std::string string_array(const std::vector<std::string>& values) {
  Node arr(true);
  for (const std::string& v : values) arr.push(quoted(v));
  return arr.str();
}

inline std::string vector_array(const Eigen::VectorXd& v) {
  Node arr(true);
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push(number(v(i)));
  return arr.str();
}

/// Matrix as {"rows", "cols", "data"} with data in column-major order.
inline std::string matrix_object(const Eigen::MatrixXd& m) {
  Node obj;
  obj.integer("rows", m.rows());
  obj.integer("cols", m.cols());
  Node data(true);
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i) data.push(number(m(i, j)));
  obj.raw("data", data.str());
  return obj.str();
}

}  // namespace swmlda::jsonw
