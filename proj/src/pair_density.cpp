#include <cmath>
#include <limits>
#include <stdexcept>

#include "ltrawl/inference.hpp"
#include "pair_kernel.hpp"

namespace ltrawl {

namespace {

void require_lag(double h) {
  if (!(h > 0.0)) throw std::invalid_argument("pair density needs a positive lag");
}

void require_positive(double x) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw std::domain_error("pair density argument must be positive");
  }
}

}  // namespace

double pair_density_00(const ModelParams& params, double h) {
  require_lag(h);
  return std::exp(detail::PairKernel(params).log_f00(h));
}

double pair_density_10(const ModelParams& params, double h, double x1) {
  require_lag(h);
  require_positive(x1);
  return std::exp(detail::PairKernel(params).log_f10(h, x1));
}

double pair_density_01(const ModelParams& params, double h, double x2) {
  return pair_density_10(params, h, x2);
}

double pair_density_11(const ModelParams& params, double h, double x1, double x2) {
  require_lag(h);
  require_positive(x1);
  require_positive(x2);
  return std::exp(detail::PairKernel(params).log_f11(h, x1, x2));
}

double pair_density(const ModelParams& params, double h, double x1, double x2) {
  if (x1 < 0.0 || x2 < 0.0) throw std::domain_error("pair density arguments must be >= 0");
  if (x1 > 0.0 && x2 > 0.0) return pair_density_11(params, h, x1, x2);
  if (x1 > 0.0) return pair_density_10(params, h, x1);
  if (x2 > 0.0) return pair_density_01(params, h, x2);
  return pair_density_00(params, h);
}

double pair_density_mt(const ModelParams& params, double h, double z1, double z2) {
  if (params.variant != Variant::MarginalTransform) {
    throw std::invalid_argument("pair_density_mt needs MT parameters");
  }
  const MarginalTransform g{params.kappa, params.xi, params.sigma};
  if (z1 < 0.0 || z2 < 0.0) throw std::domain_error("pair density arguments must be >= 0");
  const double x1 = z1 > 0.0 ? g.inverse(z1) : 0.0;
  const double x2 = z2 > 0.0 ? g.inverse(z2) : 0.0;
  double density = pair_density(params, h, x1, x2);
  if (z1 > 0.0) density *= g.jacobian(z1);
  if (z2 > 0.0) density *= g.jacobian(z2);
  return density;
}

double log_pair_density(const ModelParams& params, double h, double x1, double x2) noexcept {
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  if (!(h > 0.0) || !(x1 >= 0.0) || !(x2 >= 0.0)) return kNegInf;
  const detail::PairKernel kernel(params);
  if (params.variant == Variant::Original) return kernel.log_pair(h, x1, x2);
  const MarginalTransform g{params.kappa, params.xi, params.sigma};
  double log_jac = 0.0;
  double a = 0.0;
  double b = 0.0;
  if (x1 > 0.0) {
    log_jac += g.log_jacobian(x1);
    if (!g.target().in_support(x1)) return kNegInf;
    a = g.inverse(x1);
  }
  if (x2 > 0.0) {
    log_jac += g.log_jacobian(x2);
    if (!g.target().in_support(x2)) return kNegInf;
    b = g.inverse(x2);
  }
  if (!std::isfinite(log_jac)) return kNegInf;
  return kernel.log_pair(h, a, b) + log_jac;
}

}  // namespace ltrawl
