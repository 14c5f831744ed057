#pragma once

#include <stdexcept>
#include <string>

namespace swnehari {

/// Malformed or incomplete run configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A numeric routine was asked to run on parameters that fail (H1)-(H4).
class HypothesisError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Optimizer outcomes that end a run without a usable result.
class SolverError : public std::runtime_error {
 public:
  enum class Kind { max_iterations, nonfinite_value, no_roots };

  SolverError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

inline const char* to_string(SolverError::Kind k) {
  switch (k) {
    case SolverError::Kind::max_iterations: return "MaxIterations";
    case SolverError::Kind::nonfinite_value: return "NonfiniteValue";
    case SolverError::Kind::no_roots: return "NoRoots";
  }
  return "Unknown";
}

}  // namespace swnehari
