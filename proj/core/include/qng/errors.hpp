#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace qng {

// Invalid argument or violated type invariant.
class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Random graph generation exhausted its retry budget without connectivity.
class GenerationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The linear equilibrium system has no solution within tolerance; strategies
// that are linear in signal estimates do not exist at the offending step.
class EquilibriumError : public std::runtime_error {
 public:
  EquilibriumError(const std::string& msg, int step)
      : std::runtime_error(msg), step_(step) {}
  int step() const { return step_; }

 private:
  int step_;
};

// Covariance propagation lost positive semidefiniteness beyond tolerance.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& msg, int agent, int step)
      : std::runtime_error(msg), agent_(agent), step_(step) {}
  int agent() const { return agent_; }
  int step() const { return step_; }

 private:
  int agent_;
  int step_;
};

// Scenario file failed to parse or validate; carries every issue found.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> issues)
      : std::runtime_error(join(issues)), issues_(std::move(issues)) {}
  const std::vector<std::string>& issues() const { return issues_; }

 private:
  static std::string join(const std::vector<std::string>& issues) {
    std::string out = "invalid configuration:";
    for (const auto& s : issues) out += "\n  - " + s;
    return out;
  }
  std::vector<std::string> issues_;
};

}  // namespace qng
