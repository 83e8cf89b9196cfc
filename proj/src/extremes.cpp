#include "ltrawl/extremes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace ltrawl {

namespace {

constexpr std::size_t kMinPairs = 100;

struct TailShapes {
  double own;
  double shared;
  double beta;
  double kappa;
};

TailShapes tail_shapes(const ModelParams& params, double h) {
  params.validate();
  if (!(h > 0.0)) throw std::invalid_argument("lag must be positive");
  const auto s = pair_shapes(params.trawl, params.alpha, h);
  return {s.own, s.shared, params.beta, params.kappa};
}

// -log(1 - F_2e(x)), increasing in x.
double log_survival(const TailShapes& t, double x) {
  return t.shared * std::log1p(x / (t.beta + 2.0 * t.kappa)) + t.own * std::log1p(x / (t.beta + t.kappa));
}

double log_survival_derivative(const TailShapes& t, double x) {
  return t.shared / (t.beta + 2.0 * t.kappa + x) + t.own / (t.beta + t.kappa + x);
}

double latent_quantile(const TailShapes& t, double p) {
  if (!(p >= 0.0 && p < 1.0)) throw std::domain_error("probability must lie in [0, 1)");
  if (p == 0.0) return 0.0;
  const double target = -std::log1p(-p);
  double lo = 0.0;
  double hi = t.beta + t.kappa;
  while (log_survival(t, hi) < target) {
    lo = hi;
    hi *= 2.0;
    if (!std::isfinite(hi)) throw std::domain_error("F_2e quantile overflow");
  }
  double x = 0.5 * (lo + hi);
  for (int iter = 0; iter < 200; ++iter) {
    const double r = log_survival(t, x) - target;
    if (r == 0.0) return x;
    if (r > 0.0) hi = x; else lo = x;
    double next = x - r / log_survival_derivative(t, x);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - x) <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, x)) {
      return next;
    }
    x = next;
  }
  return x;
}

void require_levels(std::span<const double> levels) {
  for (double u : levels) {
    if (!(u > 0.0 && u < 1.0)) throw std::invalid_argument("levels must lie in (0, 1)");
  }
}

// Mid-ranks scaled to (0, 1) by n + 1.
std::vector<double> rank_scale(const std::vector<double>& x) {
  const std::size_t n = x.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> r(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && x[order[j + 1]] == x[order[i]]) ++j;
    const double mid = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t m = i; m <= j; ++m) r[order[m]] = mid / static_cast<double>(n + 1);
    i = j + 1;
  }
  return r;
}

std::vector<ChiPoint> conditional_exceedance(const std::vector<double>& first,
                                             const std::vector<double>& second,
                                             std::span<const double> levels) {
  std::vector<ChiPoint> out;
  out.reserve(levels.size());
  for (double u : levels) {
    std::size_t cond = 0;
    std::size_t joint = 0;
    for (std::size_t t = 0; t < first.size(); ++t) {
      if (first[t] > u) {
        ++cond;
        if (second[t] > u) ++joint;
      }
    }
    const double nan = std::numeric_limits<double>::quiet_NaN();
    if (cond == 0) {
      out.push_back({u, nan, nan, 0});
      continue;
    }
    const double c = static_cast<double>(joint) / static_cast<double>(cond);
    out.push_back({u, c, std::sqrt(c * (1.0 - c) / static_cast<double>(cond)), cond});
  }
  return out;
}

}  // namespace

double f2e(const ModelParams& params, double h, double x) {
  const auto t = tail_shapes(params, h);
  if (!(x >= 0.0)) throw std::domain_error("f2e needs x >= 0");
  double latent = x;
  if (params.variant == Variant::MarginalTransform) {
    const MarginalTransform g{params.kappa, params.xi, params.sigma};
    if (!g.target().in_support(x)) return 1.0;
    latent = g.inverse(x);
  }
  return -std::expm1(-log_survival(t, latent));
}

double f2e_inverse(const ModelParams& params, double h, double p) {
  const auto t = tail_shapes(params, h);
  const double x = latent_quantile(t, p);
  if (params.variant == Variant::MarginalTransform) {
    return MarginalTransform{params.kappa, params.xi, params.sigma}.forward(x);
  }
  return x;
}

double cond_tail_dep(const ModelParams& params, double h, double u1, double u2) {
  const auto t = tail_shapes(params, h);
  const double q1 = latent_quantile(t, u1);
  const double q2 = latent_quantile(t, u2);
  return std::exp(-t.shared * std::log1p(q2 / (t.beta + 2.0 * t.kappa + q1)) -
                  t.own * std::log1p(q2 / (t.beta + t.kappa)));
}

TailDepCurve tail_dep_curve(const ModelParams& params, double h, std::span<const double> levels) {
  require_levels(levels);
  TailDepCurve c;
  c.lag = h;
  c.levels.assign(levels.begin(), levels.end());
  for (double u : levels) c.values.push_back(cond_tail_dep(params, h, u, u));
  return c;
}

TailDecayReport cond_tail_dep_limit(const ModelParams& params, double h) {
  const auto t = tail_shapes(params, h);
  const std::vector<double> levels{0.9, 0.99, 0.999, 0.9999, 0.99999};
  TailDecayReport r;
  r.limit = 0.0;
  r.decay = tail_dep_curve(params, h, levels);
  r.own_shape = t.own;
  r.shared_shape = t.shared;
  r.note = "asymptotically independent: phi(h, u, u) decays to 0 as u -> 1";
  return r;
}

ClusterSummary extremal_index_runs(std::span<const double> values, double threshold, int run_length) {
  if (run_length < 1) throw std::invalid_argument("run length must be >= 1");
  ClusterSummary s;
  s.threshold = threshold;
  s.run_length = run_length;
  int quiet = run_length;
  for (double v : values) {
    if (v > threshold) {
      if (quiet >= run_length) ++s.clusters;
      ++s.exceedances;
      quiet = 0;
    } else {
      ++quiet;
    }
  }
  if (s.exceedances == 0) throw std::invalid_argument("no exceedances above the threshold");
  s.theta = static_cast<double>(s.clusters) / static_cast<double>(s.exceedances);
  return s;
}

std::vector<ChiPoint> empirical_chi(std::span<const double> values, std::span<const double> levels,
                                    std::size_t lag) {
  require_levels(levels);
  if (lag == 0) throw std::invalid_argument("lag must be >= 1");
  if (values.size() < lag + kMinPairs) {
    throw std::invalid_argument("empirical chi needs at least " + std::to_string(kMinPairs) + " pairs");
  }
  const auto r = rank_scale({values.begin(), values.end()});
  const std::size_t m = values.size() - lag;
  return conditional_exceedance({r.begin(), r.begin() + static_cast<std::ptrdiff_t>(m)},
                                {r.begin() + static_cast<std::ptrdiff_t>(lag), r.end()}, levels);
}

std::vector<ChiPoint> empirical_cond_tail_dep(std::span<const double> values,
                                              std::span<const double> levels, std::size_t lag) {
  require_levels(levels);
  if (lag == 0) throw std::invalid_argument("lag must be >= 1");
  std::vector<double> first;
  std::vector<double> second;
  for (std::size_t t = 0; t + lag < values.size(); ++t) {
    if (values[t] > 0.0 && values[t + lag] > 0.0) {
      first.push_back(values[t]);
      second.push_back(values[t + lag]);
    }
  }
  if (first.size() < kMinPairs) {
    throw std::invalid_argument("conditional tail dependence needs at least " +
                                std::to_string(kMinPairs) + " jointly positive pairs");
  }
  return conditional_exceedance(rank_scale(first), rank_scale(second), levels);
}

}  // namespace ltrawl
