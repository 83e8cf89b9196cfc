#pragma once

namespace ltrawl {

// Generalised Pareto distribution in the (shape xi, scale sigma) sense,
//   F(x) = 1 - (1 + xi x / sigma)^(-1/xi),  x in [0, upper_endpoint()].
// The latent-model parametrisation GPD(alpha, beta) has density
// (alpha/beta)(1 + x/beta)^-(alpha+1), i.e. xi = 1/alpha and sigma = beta/alpha.
struct Gpd {
  double shape;
  double scale;

  static Gpd from_alpha_beta(double alpha, double beta);

  // +infinity for shape >= 0.
  double upper_endpoint() const;
  bool in_support(double x) const;

  // These throw std::domain_error outside the support.
  double pdf(double x) const;
  double cdf(double x) const;
  double survival(double x) const;
  double quantile(double p) const;  // p in [0, 1]

  // log density; -infinity outside the support, never throws.
  double log_pdf(double x) const noexcept;
};

// Below this |xi| the exponential limit is used.
inline constexpr double kGpdExponentialLimit = 1e-8;

double gpd_pdf(double x, const Gpd& gpd);
double gpd_cdf(double x, const Gpd& gpd);
double gpd_quantile(double p, const Gpd& gpd);

}  // namespace ltrawl
