#pragma once

#include <stdexcept>
#include <string>

namespace s2s {

// Invalid arguments are reported with std::invalid_argument. The types below
// cover model-dependent failures that callers are expected to recover from.

/// A linear solve needed by a fixed point or equilibrium is ill conditioned.
class SingularModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The pair (A, B) is not controllable within the conditioning tolerance.
class UncontrollableModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The Riccati fixed-point iteration did not converge.
class RiccatiDivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The output feedforward gain (M B + E) is numerically zero.
class DegenerateFeedforwardError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad scenario configuration. `key()` names the offending entry.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& what)
      : std::runtime_error(key.empty() ? what : key + ": " + what), key_(std::move(key)) {}

  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

}  // namespace s2s
