#include "ortest/error.hpp"

namespace ortest {

NumericError::NumericError(const std::string& what, double condition)
    : std::runtime_error(what), condition_(condition) {}

InfeasibleError::InfeasibleError(const std::string& what, double supremum)
    : NumericError(what), supremum_(supremum) {}

}  // namespace ortest
