#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ltrawl {

// Base class for every error raised by the library. Precondition violations
// use std::invalid_argument directly; the types below carry extra context.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A pair density came out nonpositive (or non-finite) while building a
// pairwise likelihood.
class PairDensityError : public Error {
 public:
  PairDensityError(std::size_t first, std::size_t second, double value);

  std::size_t first() const noexcept { return first_; }
  std::size_t second() const noexcept { return second_; }
  double value() const noexcept { return value_; }

 private:
  std::size_t first_;
  std::size_t second_;
  double value_;
};

class SingularMatrixError : public Error {
 public:
  explicit SingularMatrixError(double condition_number);

  double condition_number() const noexcept { return condition_number_; }

 private:
  double condition_number_;
};

class QuadratureError : public Error {
 public:
  QuadratureError(const std::string& what, double error_estimate);

  double error_estimate() const noexcept { return error_estimate_; }

 private:
  double error_estimate_;
};

}  // namespace ltrawl
