#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ltrawl/gpd.hpp"
#include "ltrawl/trawl.hpp"

namespace ltrawl {

enum class Variant {
  Original,           // parameters (alpha, beta, rho, kappa)
  MarginalTransform,  // parameters (xi, sigma, rho, kappa), latent alpha = beta = 1
};

std::string to_string(Variant v);
Variant variant_from_string(const std::string& name);  // "original" | "mt"

// Parameters of the latent trawl exceedance model.
//
// Given the latent Gamma trawl process Lambda, observations are conditionally
// independent with X_j = 0 with probability 1 - exp(-kappa Lambda_j) and
// X_j ~ Exponential(Lambda_j) otherwise. Integrating out Lambda gives
// {X | X > 0} ~ GPD(alpha, beta + kappa). The marginal transformation variant
// fixes alpha = beta = 1 and maps positive values through
//   g = F^-1_{GPD(xi, sigma)} o F_{GPD(1, 1 + kappa)}.
struct ModelParams {
  Variant variant = Variant::Original;
  TrawlSpec trawl = TrawlSpec::exponential(1.0);
  double kappa = 1.0;
  double alpha = 1.0;
  double beta = 1.0;
  double xi = 1.0;
  double sigma = 2.0;

  static ModelParams original(double alpha, double beta, double rho, double kappa);
  static ModelParams original(double alpha, double beta, TrawlSpec trawl, double kappa);
  static ModelParams marginal_transform(double xi, double sigma, double rho, double kappa);

  // Throws std::invalid_argument on out-of-range values.
  void validate() const;

  GammaSeed seed() const { return {alpha, beta}; }

  // Law of {X | X > 0} on the latent scale: GPD(alpha, beta + kappa).
  Gpd latent_exceedance_gpd() const;
  // Law of positive observations: latent GPD for Original, GPD(xi, sigma) for MT.
  Gpd exceedance_gpd() const;

  // (alpha, beta, rho, kappa) or (xi, sigma, rho, kappa); needs a single-term trawl.
  std::array<double, 4> natural() const;
  static ModelParams from_natural(Variant v, const std::array<double, 4>& theta);
  static std::array<std::string, 4> parameter_names(Variant v);
};

// Observed exceedances X_j = max(Y_j - u, 0) at increasing times. `positions`
// holds each observation's index on the original sampling grid, so that rows
// dropped as missing keep their place when pairing observations.
struct ExceedanceSeries {
  std::vector<double> times;
  std::vector<double> values;
  std::vector<std::int64_t> positions;
  double threshold = 0.0;

  // Validates and fills positions with 0..k-1 when empty.
  static ExceedanceSeries from_values(std::vector<double> times, std::vector<double> values,
                                      double threshold = 0.0,
                                      std::vector<std::int64_t> positions = {});
  // Applies X = max(Y - u, 0).
  static ExceedanceSeries from_raw(std::vector<double> times, std::span<const double> raw,
                                   double threshold, std::vector<std::int64_t> positions = {});

  std::size_t size() const noexcept { return values.size(); }
  std::size_t exceedances() const;      // l
  std::size_t non_exceedances() const;  // m
  void validate() const;
};

// Shape parameters of the three independent Gamma slices behind (X_0, X_h):
// own = alpha leb(A \ A_h)/leb(A) (same for both ends), shared = alpha leb(A cap A_h)/leb(A).
struct PairShapes {
  double own;
  double shared;
};
PairShapes pair_shapes(const TrawlSpec& trawl, double alpha, double h);

ExceedanceSeries simulate_exceedances(const ModelParams& params, std::span<const double> times,
                                      std::uint64_t rng_seed);

// P(X > 0) = (1 + kappa/beta)^-alpha.
double exceedance_prob(const ModelParams& params);

// kappa solving (1 + kappa/beta)^-alpha = p.
double kappa_for_exceedance_prob(double alpha, double beta, double p);

// g and its inverse between the latent exceedance scale GPD(1, 1 + kappa) and
// GPD(xi, sigma).
struct MarginalTransform {
  double kappa;
  double xi;
  double sigma;

  double forward(double x) const;   // x > 0 -> z
  double inverse(double z) const;   // throws outside the GPD(xi, sigma) support
  double jacobian(double z) const;  // d g^-1 / dz
  double log_jacobian(double z) const noexcept;
  Gpd target() const { return {xi, sigma}; }
};

double transform_mt(double x, double kappa, double xi, double sigma);
double inverse_transform_mt(double z, double kappa, double xi, double sigma);
double jacobian_mt(double z, double kappa, double xi, double sigma);

// E[X]. Original needs alpha > 1, MT needs xi < 1.
double mean_exceedance(const ModelParams& params);
// Var(X). Original needs alpha > 2.
double variance_exceedance(const ModelParams& params);

// P(X_0 > x0, X_h > xh) for x0, xh >= 0 (both strictly positive on the event).
double joint_exceedance_survivor(const ModelParams& params, double h, double x0, double xh);

// Cov(X_0, X_h) for the Original variant, alpha > 2, h > 0, by adaptive
// quadrature of E[X_0 X_h].
double acov_exceedance(const ModelParams& params, double h);
double acf_exceedance(const ModelParams& params, double h);

}  // namespace ltrawl
