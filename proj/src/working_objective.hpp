#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "ltrawl/inference.hpp"

namespace ltrawl::detail {

// Mean log-PL as a function of working coordinates; NaN outside the domain.
class WorkingObjective {
 public:
  WorkingObjective(const PairwiseLikelihood& pl, Variant variant, bool transform)
      : pl_(pl), variant_(variant), transform_(transform),
        scale_(1.0 / static_cast<double>(pl.observations())) {}

  double operator()(const std::array<double, 4>& eta) const {
    try {
      const double v = pl_.evaluate(from_working(variant_, eta, transform_)) * scale_;
      return std::isfinite(v) ? v : std::numeric_limits<double>::quiet_NaN();
    } catch (const std::invalid_argument&) {
      return std::numeric_limits<double>::quiet_NaN();
    }
  }

 private:
  const PairwiseLikelihood& pl_;
  Variant variant_;
  bool transform_;
  double scale_;
};

}  // namespace ltrawl::detail
