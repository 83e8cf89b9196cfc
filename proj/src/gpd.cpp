#include "ltrawl/gpd.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace ltrawl {

namespace {

bool exponential_limit(double shape) { return std::abs(shape) < kGpdExponentialLimit; }

// log(1 + xi x / sigma) / xi, the cumulative hazard of the GPD.
double cumulative_hazard(const Gpd& g, double x) {
  if (exponential_limit(g.shape)) return x / g.scale;
  return std::log1p(g.shape * x / g.scale) / g.shape;
}

void require_support(const Gpd& g, double x) {
  if (!g.in_support(x)) {
    throw std::domain_error("GPD argument outside support: " + std::to_string(x));
  }
}

void require_scale(const Gpd& g) {
  if (!(g.scale > 0.0)) throw std::invalid_argument("GPD scale must be positive");
}

}  // namespace

Gpd Gpd::from_alpha_beta(double alpha, double beta) {
  if (!(alpha > 0.0) || !(beta > 0.0)) {
    throw std::invalid_argument("GPD(alpha, beta) needs alpha, beta > 0");
  }
  return {1.0 / alpha, beta / alpha};
}

double Gpd::upper_endpoint() const {
  if (shape < 0.0 && !exponential_limit(shape)) return -scale / shape;
  return std::numeric_limits<double>::infinity();
}

bool Gpd::in_support(double x) const { return x >= 0.0 && x <= upper_endpoint(); }

double Gpd::pdf(double x) const {
  require_scale(*this);
  require_support(*this, x);
  return std::exp(log_pdf(x));
}

double Gpd::log_pdf(double x) const noexcept {
  if (!(scale > 0.0) || !in_support(x)) return -std::numeric_limits<double>::infinity();
  if (exponential_limit(shape)) return -std::log(scale) - x / scale;
  return -std::log(scale) - (1.0 / shape + 1.0) * std::log1p(shape * x / scale);
}

double Gpd::cdf(double x) const {
  require_scale(*this);
  require_support(*this, x);
  return -std::expm1(-cumulative_hazard(*this, x));
}

double Gpd::survival(double x) const {
  require_scale(*this);
  require_support(*this, x);
  return std::exp(-cumulative_hazard(*this, x));
}

double Gpd::quantile(double p) const {
  require_scale(*this);
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::domain_error("GPD probability outside [0, 1]: " + std::to_string(p));
  }
  if (p == 1.0) return upper_endpoint();
  const double hazard = -std::log1p(-p);
  if (exponential_limit(shape)) return scale * hazard;
  return scale * std::expm1(shape * hazard) / shape;
}

double gpd_pdf(double x, const Gpd& gpd) { return gpd.pdf(x); }
double gpd_cdf(double x, const Gpd& gpd) { return gpd.cdf(x); }
double gpd_quantile(double p, const Gpd& gpd) { return gpd.quantile(p); }

}  // namespace ltrawl
