#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace stackgame {

/// Base class for failures raised while solving (as opposed to bad input).
class SolverError : public std::runtime_error {
 public:
  SolverError(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}

  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

/// No outer action admits a feasible inner action.
class InfeasibleState : public SolverError {
 public:
  static constexpr std::size_t kUnknownState = static_cast<std::size_t>(-1);

  explicit InfeasibleState(std::size_t state = kUnknownState)
      : SolverError("InfeasibleState", message(state)), state_(state) {}

  std::size_t state() const noexcept { return state_; }

 private:
  static std::string message(std::size_t state) {
    if (state == kUnknownState) {
      return "no outer action has a feasible inner response";
    }
    return "no outer action has a feasible inner response at state " +
           std::to_string(state);
  }

  std::size_t state_;
};

/// An iterate left the finite range (usually: step sizes too large).
class NonFiniteIterate : public SolverError {
 public:
  NonFiniteIterate(const std::string& where, long iteration)
      : SolverError("NonFiniteIterate",
                    where + ": non-finite iterate at iteration " +
                        std::to_string(iteration)),
        iteration_(iteration) {}

  long iteration() const noexcept { return iteration_; }

 private:
  long iteration_;
};

class RegressionSingular : public SolverError {
 public:
  explicit RegressionSingular(const std::string& what)
      : SolverError("RegressionSingular", what) {}
};

class DegenerateState : public SolverError {
 public:
  explicit DegenerateState(const std::string& what)
      : SolverError("DegenerateState", what) {}
};

/// Malformed or inconsistent configuration. `field` names the offending key.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& what)
      : std::runtime_error(field.empty() ? what : field + ": " + what),
        field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

}  // namespace stackgame
