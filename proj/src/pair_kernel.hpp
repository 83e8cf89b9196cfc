#pragma once

#include <cmath>
#include <limits>
#include <utility>

#include "ltrawl/model.hpp"

namespace ltrawl::detail {

// Log pair densities on the latent scale for one parameter set. Arguments are
// assumed valid (h > 0, x > 0); nonpositive densities come back as -infinity.
class PairKernel {
 public:
  explicit PairKernel(const ModelParams& p)
      : trawl_(&p.trawl), alpha_(p.alpha), beta_(p.beta), kappa_(p.kappa),
        log_alpha_(std::log(p.alpha)),
        exceed_prob_(std::exp(-p.alpha * std::log1p(p.kappa / p.beta))) {}

  double log_f00(double h) const {
    const auto b = shapes(h);
    const double both = std::exp(log_laplace(b, kappa_, kappa_));
    return safe_log(1.0 - 2.0 * exceed_prob_ + both);
  }

  double log_f10(double h, double x) const {
    const auto b = shapes(h);
    const double a = kappa_ + x;
    const double log_first = log_alpha_ - std::log(beta_ + a) - alpha_ * std::log1p(a / beta_);
    const double slope = b.own / (beta_ + a) + b.shared / (beta_ + a + kappa_);
    const double log_second = log_laplace(b, a, kappa_) + std::log(slope);
    const double ratio = std::exp(log_second - log_first);
    if (!(ratio < 1.0)) return -std::numeric_limits<double>::infinity();
    return log_first + std::log1p(-ratio);
  }

  double log_f11(double h, double x1, double x2) const {
    // Ordered arguments keep the result bitwise symmetric.
    if (x2 < x1) std::swap(x1, x2);
    const auto b = shapes(h);
    const double u1 = kappa_ + x1;
    const double u2 = kappa_ + x2;
    const double s = beta_ + u1 + u2;
    const double d1 = b.own / (beta_ + u1) + b.shared / s;
    const double d2 = b.own / (beta_ + u2) + b.shared / s;
    const double d12 = b.shared / (s * s);
    return log_laplace(b, u1, u2) + std::log(d1 * d2 + d12);
  }

  double log_pair(double h, double x1, double x2) const {
    if (x1 > 0.0 && x2 > 0.0) return log_f11(h, x1, x2);
    if (x1 > 0.0) return log_f10(h, x1);
    if (x2 > 0.0) return log_f10(h, x2);
    return log_f00(h);
  }

 private:
  PairShapes shapes(double h) const { return pair_shapes(*trawl_, alpha_, h); }

  double log_laplace(const PairShapes& b, double u1, double u2) const {
    return -b.own * std::log1p(u1 / beta_) - b.shared * std::log1p((u1 + u2) / beta_) -
           b.own * std::log1p(u2 / beta_);
  }

  static double safe_log(double v) {
    return v > 0.0 ? std::log(v) : -std::numeric_limits<double>::infinity();
  }

  const TrawlSpec* trawl_;
  double alpha_;
  double beta_;
  double kappa_;
  double log_alpha_;
  double exceed_prob_;
};

}  // namespace ltrawl::detail
