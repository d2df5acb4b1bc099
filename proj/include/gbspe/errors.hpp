#pragma once

#include <stdexcept>
#include <string>

namespace gbspe {

/// Invalid arguments or configuration supplied by the caller.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A computation would exceed the configured hafnian budget.
class BudgetExceeded : public std::runtime_error {
 public:
  BudgetExceeded(const std::string& what, double estimated_cost)
      : std::runtime_error(what), estimated_cost_(estimated_cost) {}

  double estimated_cost() const noexcept { return estimated_cost_; }

 private:
  double estimated_cost_;
};

/// A numerical invariant that should always hold was violated.
class InconsistencyError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// The instance is outside the region where guaranteed sample sizes are
/// defined (target value numerically zero).
class IllPosedError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace gbspe
