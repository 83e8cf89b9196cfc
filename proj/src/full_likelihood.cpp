#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ltrawl/inference.hpp"

namespace ltrawl {

namespace {

// Mixed partial derivative d^l/du_{P} of E[exp(-sum_j u_j Lambda_j)] at u,
// exactly. With log L = sum over slices of -b_m log(1 + u_m^+/beta), every
// mixed partial of log L is a sum over the slices covering the differentiated
// indices, and the derivative of exp(log L) follows from the set-partition
// recursion F(S) = sum_{T subset S \ {j}} d_{T+j} log L * F(S \ (T+j)).
double exact_mixed_partial(const SlicePartition& partition, double shape_per_area, double beta,
                           const std::vector<double>& u, const std::vector<std::size_t>& positives) {
  const std::size_t l = positives.size();
  std::vector<double> prefix(u.size() + 1, 0.0);
  for (std::size_t j = 0; j < u.size(); ++j) prefix[j + 1] = prefix[j] + u[j];

  double log_laplace = 0.0;
  std::vector<double> slice_arg(partition.slices.size());
  for (std::size_t m = 0; m < partition.slices.size(); ++m) {
    const auto& s = partition.slices[m];
    const double load = prefix[s.last + 1] - prefix[s.first];
    slice_arg[m] = beta + load;
    log_laplace -= shape_per_area * s.measure * std::log1p(load / beta);
  }
  if (l == 0) return std::exp(log_laplace);

  const std::size_t subsets = std::size_t{1} << l;
  std::vector<double> dlog(subsets, 0.0);
  for (std::size_t mask = 1; mask < subsets; ++mask) {
    std::size_t lo = u.size();
    std::size_t hi = 0;
    int n = 0;
    for (std::size_t b = 0; b < l; ++b) {
      if (mask >> b & 1U) {
        lo = std::min(lo, positives[b]);
        hi = std::max(hi, positives[b]);
        ++n;
      }
    }
    // d^n/du^n log(1 + u/beta) = (-1)^(n-1) (n-1)! / (beta + u)^n
    const double factorial = std::tgamma(static_cast<double>(n));
    const double sign = (n % 2 == 1) ? 1.0 : -1.0;
    double total = 0.0;
    for (std::size_t m = 0; m < partition.slices.size(); ++m) {
      const auto& s = partition.slices[m];
      if (s.first <= lo && s.last >= hi) {
        total -= shape_per_area * s.measure * sign * factorial / std::pow(slice_arg[m], n);
      }
    }
    dlog[mask] = total;
  }

  std::vector<double> ratio(subsets, 0.0);
  ratio[0] = 1.0;
  for (std::size_t mask = 1; mask < subsets; ++mask) {
    std::size_t top = 0;
    for (std::size_t b = 0; b < l; ++b) {
      if (mask >> b & 1U) top = b;
    }
    const std::size_t pivot = std::size_t{1} << top;
    const std::size_t rest = mask ^ pivot;
    double total = 0.0;
    for (std::size_t sub = rest;; sub = (sub - 1) & rest) {
      total += dlog[sub | pivot] * ratio[rest ^ sub];
      if (sub == 0) break;
    }
    ratio[mask] = total;
  }
  return std::exp(log_laplace) * ratio[subsets - 1];
}

double finite_difference_mixed_partial(const ModelParams& params, const std::vector<double>& times,
                                       const std::vector<double>& u,
                                       const std::vector<std::size_t>& positives, double step) {
  const std::size_t l = positives.size();
  const std::size_t corners = std::size_t{1} << l;
  double total = 0.0;
  std::vector<double> shifted(u);
  for (std::size_t mask = 0; mask < corners; ++mask) {
    double sign = 1.0;
    for (std::size_t b = 0; b < l; ++b) {
      const bool up = mask >> b & 1U;
      shifted[positives[b]] = u[positives[b]] + (up ? step : -step);
      if (!up) sign = -sign;
    }
    total += sign * joint_laplace(params.seed(), params.trawl, times, shifted);
  }
  return total / std::pow(2.0 * step, static_cast<double>(l));
}

}  // namespace

double full_likelihood_small_k(const ExceedanceSeries& series, const ModelParams& params,
                               std::optional<double> finite_difference_step) {
  series.validate();
  params.validate();
  const std::size_t k = series.size();
  if (k == 0) throw std::invalid_argument("full likelihood needs at least one observation");
  if (k > kFullLikelihoodMaxSize) {
    throw std::invalid_argument("full likelihood is limited to " +
                                std::to_string(kFullLikelihoodMaxSize) + " observations");
  }

  std::vector<double> x(series.values);
  double jacobian = 1.0;
  if (params.variant == Variant::MarginalTransform) {
    const MarginalTransform g{params.kappa, params.xi, params.sigma};
    for (auto& v : x) {
      if (v > 0.0) {
        jacobian *= g.jacobian(v);
        v = g.inverse(v);
      }
    }
  }

  std::vector<std::size_t> positives;
  std::vector<std::size_t> zeros;
  for (std::size_t j = 0; j < k; ++j) (x[j] > 0.0 ? positives : zeros).push_back(j);

  const auto partition = slice_partition(params.trawl, series.times);
  const double shape_per_area = params.alpha / params.trawl.leb();
  const double l_sign = positives.size() % 2 == 0 ? 1.0 : -1.0;

  std::vector<double> u(k, 0.0);
  double total = 0.0;
  const std::size_t subsets = std::size_t{1} << zeros.size();
  for (std::size_t mask = 0; mask < subsets; ++mask) {
    std::fill(u.begin(), u.end(), 0.0);
    for (std::size_t r : positives) u[r] = params.kappa + x[r];
    int t = 0;
    for (std::size_t b = 0; b < zeros.size(); ++b) {
      if (mask >> b & 1U) {
        u[zeros[b]] = params.kappa;
        ++t;
      }
    }
    const double derivative =
        finite_difference_step
            ? finite_difference_mixed_partial(params, series.times, u, positives, *finite_difference_step)
            : exact_mixed_partial(partition, shape_per_area, params.beta, u, positives);
    total += (t % 2 == 0 ? 1.0 : -1.0) * l_sign * derivative;
  }
  return total * jacobian;
}

}  // namespace ltrawl
