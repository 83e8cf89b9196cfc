#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

#include "ltrawl/error.hpp"
#include "ltrawl/inference.hpp"
#include "pair_kernel.hpp"
#include "working_objective.hpp"

namespace ltrawl {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Observation-scale values mapped to the latent scale, plus log Jacobians.
struct LatentView {
  std::vector<double> x;
  std::vector<double> log_jacobian;
  bool valid = true;
};

// With stop_at_first == false, values outside the support get a -infinity
// log Jacobian and scanning continues, so every affected pair can be named.
LatentView latent_view(const std::vector<double>& values, const ModelParams& p,
                       bool stop_at_first = true) {
  LatentView v;
  v.x = values;
  v.log_jacobian.assign(values.size(), 0.0);
  if (p.variant == Variant::Original) return v;
  const MarginalTransform g{p.kappa, p.xi, p.sigma};
  const Gpd target = g.target();
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] <= 0.0) continue;
    if (!target.in_support(values[i])) {
      v.valid = false;
      if (stop_at_first) return v;
      v.x[i] = 0.0;
      v.log_jacobian[i] = kNegInf;
      continue;
    }
    v.x[i] = g.inverse(values[i]);
    v.log_jacobian[i] = g.log_jacobian(values[i]);
    if (!std::isfinite(v.log_jacobian[i]) || !std::isfinite(v.x[i])) {
      v.valid = false;
      if (stop_at_first) return v;
      v.x[i] = 0.0;
      v.log_jacobian[i] = kNegInf;
    }
  }
  return v;
}

}  // namespace

void PLConfig::validate() const {
  if (delta < 1) throw std::invalid_argument("delta must be >= 1");
  if (simplex_max_iterations < 0 || polish_max_iterations < 0) {
    throw std::invalid_argument("iteration limits must be >= 0");
  }
  if (!(gradient_step > 0.0) || !(hessian_step > 0.0)) {
    throw std::invalid_argument("finite-difference steps must be positive");
  }
}

PairwiseLikelihood::PairwiseLikelihood(const ExceedanceSeries& series, int delta)
    : values_(series.values), delta_(delta) {
  series.validate();
  if (delta < 1) throw std::invalid_argument("delta must be >= 1");
  if (series.size() == 0) throw std::invalid_argument("pairwise likelihood needs a nonempty series");
  std::map<double, std::size_t> zero_lags;
  const std::size_t k = series.size();
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) {
      if (series.positions[j] - series.positions[i] > delta) break;
      const Pair pair{static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j),
                      series.times[j] - series.times[i]};
      pairs_.push_back(pair);
      if (values_[i] > 0.0 || values_[j] > 0.0) {
        active_pairs_.push_back(pair);
      } else {
        ++zero_lags[pair.lag];
      }
    }
  }
  pair_count_ = pairs_.size();
  for (const auto& [lag, count] : zero_lags) zero_pairs_.push_back({lag, count});
}

double PairwiseLikelihood::evaluate(const ModelParams& params) const {
  const auto view = latent_view(values_, params);
  if (!view.valid) return kNegInf;
  const detail::PairKernel kernel(params);
  double total = 0.0;
  for (const auto& group : zero_pairs_) {
    total += static_cast<double>(group.count) * kernel.log_f00(group.lag);
  }
  for (const auto& pair : active_pairs_) {
    total += kernel.log_pair(pair.lag, view.x[pair.first], view.x[pair.second]) +
             view.log_jacobian[pair.first] + view.log_jacobian[pair.second];
  }
  return std::isnan(total) ? kNegInf : total;
}

double PairwiseLikelihood::evaluate_checked(const ModelParams& params) const {
  params.validate();
  const auto view = latent_view(values_, params, false);
  const detail::PairKernel kernel(params);
  double total = 0.0;
  for (const auto& pair : pairs_) {
    const double term = kernel.log_pair(pair.lag, view.x[pair.first], view.x[pair.second]) +
                        view.log_jacobian[pair.first] + view.log_jacobian[pair.second];
    if (!std::isfinite(term)) throw PairDensityError(pair.first, pair.second, std::exp(term));
    total += term;
  }
  return total;
}

std::vector<double> PairwiseLikelihood::contributions(const ModelParams& params) const {
  std::vector<double> out(values_.size(), 0.0);
  const auto view = latent_view(values_, params);
  if (!view.valid) {
    std::fill(out.begin(), out.end(), kNegInf);
    return out;
  }
  const detail::PairKernel kernel(params);
  std::map<double, double> zero_cache;
  for (const auto& pair : pairs_) {
    const double a = view.x[pair.first];
    const double b = view.x[pair.second];
    double term;
    if (a > 0.0 || b > 0.0) {
      term = kernel.log_pair(pair.lag, a, b) + view.log_jacobian[pair.first] +
             view.log_jacobian[pair.second];
    } else {
      auto it = zero_cache.find(pair.lag);
      if (it == zero_cache.end()) it = zero_cache.emplace(pair.lag, kernel.log_f00(pair.lag)).first;
      term = it->second;
    }
    out[pair.first] += term;
  }
  return out;
}

double log_pairwise_likelihood(const ExceedanceSeries& series, const ModelParams& params,
                               const PLConfig& config) {
  config.validate();
  return PairwiseLikelihood(series, config.delta).evaluate_checked(params);
}

std::array<double, 4> to_working(const ModelParams& params, bool transform) {
  auto theta = params.natural();
  if (!transform) return theta;
  const bool keep_first = params.variant == Variant::MarginalTransform;
  for (std::size_t i = 0; i < 4; ++i) {
    if (i == 0 && keep_first) continue;
    theta[i] = std::log(theta[i]);
  }
  return theta;
}

ModelParams from_working(Variant variant, const std::array<double, 4>& eta, bool transform) {
  auto theta = eta;
  if (transform) {
    for (std::size_t i = 0; i < 4; ++i) {
      if (i == 0 && variant == Variant::MarginalTransform) continue;
      theta[i] = std::exp(theta[i]);
    }
  }
  return ModelParams::from_natural(variant, theta);
}

namespace {

Matrix4 central_hessian(const detail::WorkingObjective& f, const std::array<double, 4>& eta, double h) {
  Matrix4 H;
  const double f0 = f(eta);
  auto shifted = [&](std::size_t a, double da, std::size_t b, double db) {
    auto e = eta;
    e[a] += da;
    e[b] += db;
    return f(e);
  };
  for (std::size_t p = 0; p < 4; ++p) {
    H(p, p) = (shifted(p, h, p, 0.0) - 2.0 * f0 + shifted(p, -h, p, 0.0)) / (h * h);
    for (std::size_t q = p + 1; q < 4; ++q) {
      H(p, q) = (shifted(p, h, q, h) - shifted(p, h, q, -h) - shifted(p, -h, q, h) +
                 shifted(p, -h, q, -h)) /
                (4.0 * h * h);
      H(q, p) = H(p, q);
    }
  }
  return H;
}

// d(natural)/d(working), diagonal.
Matrix4 working_jacobian(const ModelParams& p, bool transform) {
  Matrix4 D = Matrix4::Identity();
  if (!transform) return D;
  const auto theta = p.natural();
  for (std::size_t i = 0; i < 4; ++i) {
    if (i == 0 && p.variant == Variant::MarginalTransform) continue;
    D(i, i) = theta[i];
  }
  return D;
}

double median_spacing(const std::vector<double>& times) {
  if (times.size() < 2) return 1.0;
  std::vector<double> gaps(times.size() - 1);
  for (std::size_t i = 1; i < times.size(); ++i) gaps[i - 1] = times[i] - times[i - 1];
  std::nth_element(gaps.begin(), gaps.begin() + gaps.size() / 2, gaps.end());
  return gaps[gaps.size() / 2];
}

}  // namespace

Matrix4 log_pl_hessian(const PairwiseLikelihood& pl, const ModelParams& at, bool transform,
                       double step) {
  const detail::WorkingObjective f(pl, at.variant, transform);
  const auto eta = to_working(at, transform);
  const Matrix4 coarse = central_hessian(f, eta, step);
  const Matrix4 fine = central_hessian(f, eta, step / 2.0);
  return (4.0 * fine - coarse) / 3.0;
}

SandwichResult sandwich_covariance(const ExceedanceSeries& series, const ModelParams& estimate,
                                   const PLConfig& config) {
  config.validate();
  const PairwiseLikelihood pl(series, config.delta);
  const std::size_t k = series.size();
  const bool transform = config.transform;
  const auto eta = to_working(estimate, transform);

  SandwichResult out;
  out.sensitivity = -log_pl_hessian(pl, estimate, transform, config.hessian_step);
  if (!out.sensitivity.allFinite()) throw SingularMatrixError(std::numeric_limits<double>::infinity());

  // Per-observation scores by central differences of the contributions.
  std::vector<std::array<double, 4>> scores(k);
  for (std::size_t p = 0; p < 4; ++p) {
    auto up = eta;
    auto down = eta;
    up[p] += config.gradient_step;
    down[p] -= config.gradient_step;
    const auto cu = pl.contributions(from_working(estimate.variant, up, transform));
    const auto cd = pl.contributions(from_working(estimate.variant, down, transform));
    for (std::size_t i = 0; i < k; ++i) scores[i][p] = (cu[i] - cd[i]) / (2.0 * config.gradient_step);
  }

  // Overlapping blocks long enough to cover the dependence range.
  const double rho = estimate.trawl.decay();
  const double reach = 3.0 / (rho * median_spacing(series.times));
  std::size_t block = std::max<std::size_t>(static_cast<std::size_t>(config.delta),
                                            static_cast<std::size_t>(std::ceil(reach)));
  block = std::clamp<std::size_t>(block, 1, std::max<std::size_t>(1, k / 2));
  out.block_length = block;

  Eigen::Vector4d mean = Eigen::Vector4d::Zero();
  for (const auto& s : scores) mean += Eigen::Vector4d(s.data());
  mean /= static_cast<double>(k);

  Eigen::Vector4d running = Eigen::Vector4d::Zero();
  for (std::size_t i = 0; i < block; ++i) running += Eigen::Vector4d(scores[i].data());
  Matrix4 J = Matrix4::Zero();
  const std::size_t blocks = k - block + 1;
  for (std::size_t t = 0;; ++t) {
    const Eigen::Vector4d centred = running - static_cast<double>(block) * mean;
    J += centred * centred.transpose();
    if (t + 1 == blocks) break;
    running += Eigen::Vector4d(scores[t + block].data()) - Eigen::Vector4d(scores[t].data());
  }
  out.variability = J / (static_cast<double>(blocks) * static_cast<double>(block));

  const Eigen::SelfAdjointEigenSolver<Matrix4> eig(out.sensitivity);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  const double condition = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
  if (!(lo > 0.0) || condition > 1e12) throw SingularMatrixError(condition);

  const Matrix4 h_inv = out.sensitivity.inverse();
  out.working_covariance = h_inv * out.variability * h_inv / static_cast<double>(k);
  out.working_covariance = 0.5 * (out.working_covariance + out.working_covariance.transpose()).eval();
  const Matrix4 D = working_jacobian(estimate, transform);
  out.covariance = D * out.working_covariance * D;
  out.covariance = 0.5 * (out.covariance + out.covariance.transpose()).eval();
  return out;
}

ModelParams init_heuristic(const ExceedanceSeries& series, Variant variant,
                           const InitConfig& config) {
  series.validate();
  std::vector<double> positive;
  for (double v : series.values) {
    if (v > 0.0) positive.push_back(v);
  }
  if (positive.size() < 10) {
    throw std::invalid_argument("init_heuristic needs at least 10 exceedances, got " +
                                std::to_string(positive.size()));
  }

  // Probability-weighted moments (Hosking & Wallis 1987).
  std::sort(positive.begin(), positive.end());
  const double n = static_cast<double>(positive.size());
  double b0 = 0.0;
  double b1 = 0.0;
  for (std::size_t i = 0; i < positive.size(); ++i) {
    b0 += positive[i];
    b1 += static_cast<double>(i) / (n - 1.0) * positive[i];
  }
  b0 /= n;
  b1 /= n;
  // With a1 = E[X (1 - F)] = b0 - b1: xi = 2 - a0 / (a0 - 2 a1), sigma = 2 a0 a1 / (a0 - 2 a1).
  double xi = 2.0 - b0 / (2.0 * b1 - b0);
  double sigma = 2.0 * b0 * (b0 - b1) / (2.0 * b1 - b0);
  if (!std::isfinite(xi) || !(sigma > 0.0)) {
    xi = 0.1;
    sigma = b0 * 0.9;
  }

  const double p_hat = n / static_cast<double>(series.size());
  double alpha = 1.0;
  double beta = 1.0;
  double kappa = 0.0;
  ModelParams out;
  if (variant == Variant::Original) {
    xi = std::clamp(xi, 0.02, 0.95);
    alpha = 1.0 / xi;
    const double scale = sigma * alpha;  // beta + kappa
    beta = scale * std::pow(p_hat, 1.0 / alpha);
    kappa = std::max(scale - beta, config.kappa_floor);
  } else {
    kappa = std::max(1.0 / p_hat - 1.0, config.kappa_floor);
    // Keep the largest observation strictly inside a bounded support.
    if (xi < 0.0) xi = std::max(xi, -sigma / (1.05 * positive.back()));
  }

  // Exceedance-indicator autocorrelation, inverted through
  //   P(X_0 > 0, X_h > 0) / p^2 = c^(alpha acf(h)),  c = (1 + kappa/beta)^2 / (1 + 2 kappa/beta).
  std::map<std::int64_t, std::size_t> index;
  for (std::size_t i = 0; i < series.size(); ++i) index[series.positions[i]] = i;
  const double log_c = 2.0 * std::log1p(kappa / beta) - std::log1p(2.0 * kappa / beta);
  const double noise = 2.0 / std::sqrt(static_cast<double>(series.size()));
  double num = 0.0;
  double den = 0.0;
  for (int h = 1; h <= config.max_lag; ++h) {
    double both = 0.0;
    double count = 0.0;
    for (std::size_t i = 0; i < series.size(); ++i) {
      const auto it = index.find(series.positions[i] + h);
      if (it == index.end()) continue;
      count += 1.0;
      both += (series.values[i] > 0.0 && series.values[it->second] > 0.0) ? 1.0 : 0.0;
    }
    if (count < 1.0) break;
    const double r = (both / count - p_hat * p_hat) / (p_hat * (1.0 - p_hat));
    if (!(r > noise)) break;
    const double latent = std::log1p(r * (1.0 - p_hat) / p_hat) / (alpha * log_c);
    if (!(latent > 0.0)) break;
    const double lag = static_cast<double>(h) * median_spacing(series.times);
    num += -lag * std::log(std::min(latent, 1.0));
    den += lag * lag;
  }
  double rho = den > 0.0 ? num / den : config.rho_ceiling;
  rho = std::clamp(rho, config.rho_floor, config.rho_ceiling);

  if (variant == Variant::Original) return ModelParams::original(alpha, beta, rho, kappa);
  return ModelParams::marginal_transform(xi, sigma, rho, kappa);
}

}  // namespace ltrawl
