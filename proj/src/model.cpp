#include "ltrawl/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "ltrawl/error.hpp"
#include "ltrawl/quadrature.hpp"
#include "ltrawl/rng.hpp"

namespace ltrawl {

namespace {

constexpr double kAcovTolerance = 1e-9;
constexpr double kAcovHardLimit = 1e-6;
// Smaller exceedances are floating-point residue of Y - u.
constexpr double kZeroExceedance = 1e-12;

bool near_zero_shape(double xi) { return std::abs(xi) < kGpdExponentialLimit; }

void require_positive_lag(double h) {
  if (!(h > 0.0)) throw std::invalid_argument("lag must be positive");
}

// Latent-scale exceedance thresholds: for the MT variant observations are
// mapped back through g^-1 first.
double latent_value(const ModelParams& p, double v) {
  if (p.variant == Variant::Original || v == 0.0) return v;
  return MarginalTransform{p.kappa, p.xi, p.sigma}.inverse(v);
}

}  // namespace

std::string to_string(Variant v) { return v == Variant::Original ? "original" : "mt"; }

Variant variant_from_string(const std::string& name) {
  if (name == "original") return Variant::Original;
  if (name == "mt") return Variant::MarginalTransform;
  throw std::invalid_argument("unknown model variant '" + name + "' (expected original|mt)");
}

ModelParams ModelParams::original(double alpha, double beta, double rho, double kappa) {
  return original(alpha, beta, TrawlSpec::exponential(rho), kappa);
}

ModelParams ModelParams::original(double alpha, double beta, TrawlSpec trawl, double kappa) {
  ModelParams p;
  p.variant = Variant::Original;
  p.trawl = std::move(trawl);
  p.kappa = kappa;
  p.alpha = alpha;
  p.beta = beta;
  p.xi = 1.0 / alpha;
  p.sigma = beta / alpha;
  p.validate();
  return p;
}

ModelParams ModelParams::marginal_transform(double xi, double sigma, double rho, double kappa) {
  ModelParams p;
  p.variant = Variant::MarginalTransform;
  p.trawl = TrawlSpec::exponential(rho);
  p.kappa = kappa;
  p.alpha = 1.0;
  p.beta = 1.0;
  p.xi = xi;
  p.sigma = sigma;
  p.validate();
  return p;
}

void ModelParams::validate() const {
  if (!(kappa >= 0.0) || !std::isfinite(kappa)) throw std::invalid_argument("kappa must be >= 0");
  if (variant == Variant::Original) {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw std::invalid_argument("alpha must be > 0");
    if (!(beta > 0.0) || !std::isfinite(beta)) throw std::invalid_argument("beta must be > 0");
  } else {
    if (alpha != 1.0 || beta != 1.0) {
      throw std::invalid_argument("MT variant pins the latent layer at alpha = beta = 1");
    }
    if (!std::isfinite(xi)) throw std::invalid_argument("xi must be finite");
    if (!(sigma > 0.0) || !std::isfinite(sigma)) throw std::invalid_argument("sigma must be > 0");
  }
}

Gpd ModelParams::latent_exceedance_gpd() const { return Gpd::from_alpha_beta(alpha, beta + kappa); }

Gpd ModelParams::exceedance_gpd() const {
  return variant == Variant::Original ? latent_exceedance_gpd() : Gpd{xi, sigma};
}

std::array<double, 4> ModelParams::natural() const {
  const double rho = trawl.decay();
  if (variant == Variant::Original) return {alpha, beta, rho, kappa};
  return {xi, sigma, rho, kappa};
}

ModelParams ModelParams::from_natural(Variant v, const std::array<double, 4>& theta) {
  if (v == Variant::Original) return original(theta[0], theta[1], theta[2], theta[3]);
  return marginal_transform(theta[0], theta[1], theta[2], theta[3]);
}

std::array<std::string, 4> ModelParams::parameter_names(Variant v) {
  if (v == Variant::Original) return {"alpha", "beta", "rho", "kappa"};
  return {"xi", "sigma", "rho", "kappa"};
}

ExceedanceSeries ExceedanceSeries::from_values(std::vector<double> times, std::vector<double> values,
                                               double threshold,
                                               std::vector<std::int64_t> positions) {
  ExceedanceSeries s;
  s.times = std::move(times);
  s.values = std::move(values);
  s.threshold = threshold;
  s.positions = std::move(positions);
  if (s.positions.empty()) {
    s.positions.resize(s.values.size());
    for (std::size_t i = 0; i < s.positions.size(); ++i) s.positions[i] = static_cast<std::int64_t>(i);
  }
  s.validate();
  return s;
}

ExceedanceSeries ExceedanceSeries::from_raw(std::vector<double> times, std::span<const double> raw,
                                            double threshold, std::vector<std::int64_t> positions) {
  std::vector<double> x(raw.size());
  std::transform(raw.begin(), raw.end(), x.begin(),
                 [threshold](double y) {
                   const double x = y - threshold;
                   return x < kZeroExceedance ? 0.0 : x;
                 });
  return from_values(std::move(times), std::move(x), threshold, std::move(positions));
}

std::size_t ExceedanceSeries::exceedances() const {
  return static_cast<std::size_t>(std::count_if(values.begin(), values.end(), [](double v) { return v > 0.0; }));
}

std::size_t ExceedanceSeries::non_exceedances() const { return values.size() - exceedances(); }

void ExceedanceSeries::validate() const {
  if (times.size() != values.size() || positions.size() != values.size()) {
    throw std::invalid_argument("exceedance series: times, values and positions differ in length");
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(values[i] >= 0.0) || !std::isfinite(values[i])) {
      throw std::invalid_argument("exceedance values must be finite and >= 0 (index " +
                                  std::to_string(i) + ")");
    }
    if (i > 0 && (!(times[i] > times[i - 1]) || positions[i] <= positions[i - 1])) {
      throw std::invalid_argument("exceedance series must be strictly increasing in time (index " +
                                  std::to_string(i) + ")");
    }
  }
}

PairShapes pair_shapes(const TrawlSpec& trawl, double alpha, double h) {
  return {alpha * trawl.leb_difference(h) / trawl.leb(),
          alpha * trawl.leb_intersection(h) / trawl.leb()};
}

ExceedanceSeries simulate_exceedances(const ModelParams& params, std::span<const double> times,
                                      std::uint64_t rng_seed) {
  params.validate();
  Rng rng(rng_seed);
  const auto lambda = simulate_trawl(params.seed(), params.trawl, times, rng);
  std::vector<double> x(lambda.size(), 0.0);
  const MarginalTransform g{params.kappa, params.xi, params.sigma};
  for (std::size_t j = 0; j < lambda.size(); ++j) {
    const double rate = std::max(lambda[j], std::numeric_limits<double>::min());
    if (rng.uniform() < std::exp(-params.kappa * rate)) {
      x[j] = rng.exponential(rate);
      if (params.variant == Variant::MarginalTransform) x[j] = g.forward(x[j]);
    }
  }
  return ExceedanceSeries::from_values({times.begin(), times.end()}, std::move(x));
}

double exceedance_prob(const ModelParams& params) {
  params.validate();
  return std::exp(-params.alpha * std::log1p(params.kappa / params.beta));
}

double kappa_for_exceedance_prob(double alpha, double beta, double p) {
  if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("exceedance probability must be in (0, 1]");
  if (!(alpha > 0.0) || !(beta > 0.0)) throw std::invalid_argument("alpha and beta must be > 0");
  return beta * std::expm1(-std::log(p) / alpha);
}

double MarginalTransform::forward(double x) const {
  if (!(x >= 0.0)) throw std::domain_error("marginal transform needs x >= 0");
  const double hazard = std::log1p(x / (1.0 + kappa));
  if (near_zero_shape(xi)) return sigma * hazard;
  return sigma * std::expm1(xi * hazard) / xi;
}

double MarginalTransform::inverse(double z) const {
  if (!target().in_support(z)) {
    throw std::domain_error("value outside the GPD(xi, sigma) support: " + std::to_string(z));
  }
  const double hazard = near_zero_shape(xi) ? z / sigma : std::log1p(xi * z / sigma) / xi;
  return (1.0 + kappa) * std::expm1(hazard);
}

double MarginalTransform::log_jacobian(double z) const noexcept {
  const Gpd gz = target();
  if (!gz.in_support(z)) return -std::numeric_limits<double>::infinity();
  const double hazard = near_zero_shape(xi) ? z / sigma : std::log1p(xi * z / sigma) / xi;
  // log f_GPD(1, 1+kappa)(x) with log1p(x / (1 + kappa)) = hazard.
  const double log_latent = -std::log1p(kappa) - 2.0 * hazard;
  return gz.log_pdf(z) - log_latent;
}

double MarginalTransform::jacobian(double z) const {
  (void)inverse(z);
  return std::exp(log_jacobian(z));
}

double transform_mt(double x, double kappa, double xi, double sigma) {
  return MarginalTransform{kappa, xi, sigma}.forward(x);
}
double inverse_transform_mt(double z, double kappa, double xi, double sigma) {
  return MarginalTransform{kappa, xi, sigma}.inverse(z);
}
double jacobian_mt(double z, double kappa, double xi, double sigma) {
  return MarginalTransform{kappa, xi, sigma}.jacobian(z);
}

double mean_exceedance(const ModelParams& params) {
  const double p = exceedance_prob(params);
  if (params.variant == Variant::Original) {
    if (!(params.alpha > 1.0)) throw std::domain_error("mean exceedance undefined for alpha <= 1");
    return p * (params.beta + params.kappa) / (params.alpha - 1.0);
  }
  if (!(params.xi < 1.0)) throw std::domain_error("mean exceedance undefined for xi >= 1");
  return p * params.sigma / (1.0 - params.xi);
}

double variance_exceedance(const ModelParams& params) {
  const double p = exceedance_prob(params);
  const Gpd g = params.exceedance_gpd();
  if (!(g.shape < 0.5)) throw std::domain_error("variance undefined for shape >= 1/2");
  const double second = 2.0 * g.scale * g.scale / ((1.0 - g.shape) * (1.0 - 2.0 * g.shape));
  const double mean = mean_exceedance(params);
  return p * second - mean * mean;
}

double joint_exceedance_survivor(const ModelParams& params, double h, double x0, double xh) {
  require_positive_lag(h);
  if (!(x0 >= 0.0) || !(xh >= 0.0)) throw std::domain_error("survivor arguments must be >= 0");
  const double a = latent_value(params, x0);
  const double b = latent_value(params, xh);
  const auto shapes = pair_shapes(params.trawl, params.alpha, h);
  const double beta = params.beta;
  const double k = params.kappa;
  return std::exp(-shapes.own * std::log1p((k + a) / beta) -
                  shapes.shared * std::log1p((2.0 * k + a + b) / beta) -
                  shapes.own * std::log1p((k + b) / beta));
}

double acov_exceedance(const ModelParams& params, double h) {
  require_positive_lag(h);
  if (params.variant != Variant::Original) {
    throw std::invalid_argument("closed-form autocovariance is only available for the original variant");
  }
  if (!(params.alpha > 2.0)) throw std::domain_error("autocovariance undefined for alpha <= 2");
  const auto shapes = pair_shapes(params.trawl, params.alpha, h);
  const double beta = params.beta;
  // E[X_0 X_h] = int_kappa^inf int_kappa^inf E[exp(-u0 Lambda_0 - uh Lambda_h)] du0 duh
  const auto integrand = [&](double u0, double uh) {
    return std::exp(-shapes.own * std::log1p(u0 / beta) -
                    shapes.shared * std::log1p((u0 + uh) / beta) -
                    shapes.own * std::log1p(uh / beta));
  };
  const auto r = integrate_quadrant(integrand, params.kappa, params.kappa, kAcovTolerance);
  if (r.error > kAcovHardLimit) {
    throw QuadratureError("autocovariance quadrature did not reach tolerance", r.error);
  }
  const double mean = mean_exceedance(params);
  return r.value - mean * mean;
}

double acf_exceedance(const ModelParams& params, double h) {
  return acov_exceedance(params, h) / variance_exceedance(params);
}

}  // namespace ltrawl
