#include "ltrawl/error.hpp"

#include <sstream>

namespace ltrawl {

namespace {
std::string pair_message(std::size_t first, std::size_t second, double value) {
  std::ostringstream os;
  os << "pair density is not positive for observations (" << first << ", " << second
     << "): " << value;
  return os.str();
}

std::string singular_message(double condition_number) {
  std::ostringstream os;
  os << "Hessian is singular or indefinite (condition number " << condition_number << ")";
  return os.str();
}
}  // namespace

PairDensityError::PairDensityError(std::size_t first, std::size_t second, double value)
    : Error(pair_message(first, second, value)), first_(first), second_(second), value_(value) {}

SingularMatrixError::SingularMatrixError(double condition_number)
    : Error(singular_message(condition_number)), condition_number_(condition_number) {}

QuadratureError::QuadratureError(const std::string& what, double error_estimate)
    : Error(what), error_estimate_(error_estimate) {}

}  // namespace ltrawl
