#pragma once

#include <stdexcept>
#include <string>

namespace swmlda {

/// Base class for all errors raised by this library. Each subclass maps to a
/// distinct process exit code so batch drivers can tell misconfiguration,
/// bad input data, and numerical breakdown apart.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Invalid or inconsistent configuration: unknown keys, out-of-range knobs,
/// malformed method names, missing required settings.
class ConfigError : public Error {
public:
  explicit ConfigError(const std::string& what) : Error("config error: " + what) {}
};

/// Problems with input data: unreadable files, malformed CSV/ARFF content,
/// dimension mismatches, constraint violations such as non-binary labels.
class DataError : public Error {
public:
  explicit DataError(const std::string& what) : Error("data error: " + what) {}
};

/// Numerical breakdown during fitting: singular systems, non-finite
/// intermediates, degenerate weight or projection solutions.
class NumericError : public Error {
public:
  explicit NumericError(const std::string& what) : Error("numeric error: " + what) {}
};

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitNumeric = 4;

/// Exit code for an exception that escaped the pipeline.
inline int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e)) return kExitConfig;
  if (dynamic_cast<const DataError*>(&e)) return kExitData;
  if (dynamic_cast<const NumericError*>(&e)) return kExitNumeric;
  return kExitInternal;
}

}  // namespace swmlda
