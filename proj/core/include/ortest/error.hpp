#pragma once

#include <stdexcept>
#include <string>

namespace ortest {

/// A caller broke a documented precondition (dimension mismatch, level outside
/// (0,1), index out of range, malformed cone).
class ContractError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A factorization or solve failed on the numbers supplied. Carries a
/// condition-number estimate when one is available (0 otherwise).
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what, double condition = 0.0);

  double condition_number() const noexcept { return condition_; }

 private:
  double condition_;
};

/// The requested level cannot be attained; `supremum()` is the largest
/// attainable probability.
class InfeasibleError : public NumericError {
 public:
  InfeasibleError(const std::string& what, double supremum);

  double supremum() const noexcept { return supremum_; }

 private:
  double supremum_;
};

/// The input is valid but outside what the selected algorithm handles
/// (e.g. too many constraints for exact active-set enumeration).
class CapabilityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw ContractError(message);
}

}  // namespace ortest
