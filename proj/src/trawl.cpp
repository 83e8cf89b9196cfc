#include "ltrawl/trawl.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "ltrawl/rng.hpp"

namespace ltrawl {

namespace {

// Remaining mass of a cohort below this fraction of leb(A) is drawn as one
// lump and split afterwards by Gamma bridging.
constexpr double kLumpTolerance = 1e-7;

void require_nonnegative_lag(double h) {
  if (!(h >= 0.0)) {
    throw std::invalid_argument("lag must be nonnegative, got " + std::to_string(h));
  }
}

// Cohort geometry over a strictly increasing grid. Cohort i collects the
// points born in (t_{i-1}, t_i] (all of the past for i = 0); slice (i, j)
// is the part of cohort i that is still inside A_{t_j} but not A_{t_{j+1}}.
class CohortGeometry {
 public:
  CohortGeometry(const TrawlSpec& spec, std::span<const double> times)
      : spec_(spec), times_(times) {}

  // Measure of cohort i still alive at t_j (j >= i).
  double alive(std::size_t i, std::size_t j) const {
    double total = 0.0;
    for (const auto& term : spec_.terms()) {
      total += term.weight / term.decay * birth_factor(term.decay, i) *
               std::exp(-term.decay * (times_[j] - times_[i]));
    }
    return total;
  }

  // Measure of slice (i, j).
  double slice(std::size_t i, std::size_t j) const {
    double total = 0.0;
    for (const auto& term : spec_.terms()) {
      total += term.weight / term.decay * birth_factor(term.decay, i) *
               std::exp(-term.decay * (times_[j] - times_[i])) * death_factor(term.decay, j);
    }
    return total;
  }

 private:
  double birth_factor(double decay, std::size_t i) const {
    return i == 0 ? 1.0 : -std::expm1(-decay * (times_[i] - times_[i - 1]));
  }
  double death_factor(double decay, std::size_t j) const {
    return j + 1 == times_.size() ? 1.0 : -std::expm1(-decay * (times_[j + 1] - times_[j]));
  }

  const TrawlSpec& spec_;
  std::span<const double> times_;
};

void require_strictly_increasing(std::span<const double> times) {
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (!(times[i] > times[i - 1])) {
      throw std::invalid_argument("times must be strictly increasing (index " +
                                  std::to_string(i) + ")");
    }
  }
}

// Shares of a Gamma(a + b) variable: returns the fraction attributable to the
// Gamma(a) part. Falls back to the Bernoulli limit when both draws underflow.
double gamma_split(Rng& rng, double a, double b) {
  if (b <= 0.0) return 1.0;
  if (a <= 0.0) return 0.0;
  const double x = rng.gamma(a, 1.0);
  const double y = rng.gamma(b, 1.0);
  if (x + y > 0.0) return x / (x + y);
  return rng.uniform() < a / (a + b) ? 1.0 : 0.0;
}

}  // namespace

TrawlSpec::TrawlSpec(std::vector<TrawlTerm> terms) : terms_(std::move(terms)) {
  if (terms_.empty()) throw std::invalid_argument("trawl needs at least one term");
  double weight_sum = 0.0;
  for (const auto& term : terms_) {
    if (!(term.weight > 0.0) || !std::isfinite(term.weight)) {
      throw std::invalid_argument("trawl weights must be positive");
    }
    if (!(term.decay > 0.0) || !std::isfinite(term.decay)) {
      throw std::invalid_argument("trawl decay rates must be positive");
    }
    weight_sum += term.weight;
    leb_ += term.weight / term.decay;
  }
  if (std::abs(weight_sum - 1.0) > 1e-12) {
    throw std::invalid_argument("trawl weights must sum to one");
  }
}

TrawlSpec TrawlSpec::exponential(double decay) { return TrawlSpec({{1.0, decay}}); }

double TrawlSpec::leb_intersection(double h) const {
  require_nonnegative_lag(h);
  double total = 0.0;
  for (const auto& term : terms_) total += term.weight * std::exp(-term.decay * h) / term.decay;
  return total;
}

double TrawlSpec::leb_difference(double h) const {
  require_nonnegative_lag(h);
  double total = 0.0;
  for (const auto& term : terms_) total += -term.weight * std::expm1(-term.decay * h) / term.decay;
  return total;
}

double TrawlSpec::acf(double h) const { return leb_intersection(h) / leb_; }

double TrawlSpec::decay() const {
  if (terms_.size() != 1) throw std::logic_error("decay() requires a single-term trawl");
  return terms_.front().decay;
}

double leb_trawl(const TrawlSpec& spec) { return spec.leb(); }
double leb_intersection(const TrawlSpec& spec, double h) { return spec.leb_intersection(h); }
double acf_trawl(const TrawlSpec& spec, double h) { return spec.acf(h); }

double SlicePartition::total_measure() const {
  double total = 0.0;
  for (const auto& s : slices) total += s.measure;
  return total;
}

SlicePartition slice_partition(const TrawlSpec& spec, std::span<const double> times) {
  require_strictly_increasing(times);
  SlicePartition out;
  out.times.assign(times.begin(), times.end());
  const std::size_t k = times.size();
  out.slices.reserve(k * (k + 1) / 2);
  const CohortGeometry geometry(spec, times);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i; j < k; ++j) out.slices.push_back({i, j, geometry.slice(i, j)});
  }
  return out;
}

double seed_cumulant(const GammaSeed& seed, const TrawlSpec& spec, double u) {
  if (!(u > -seed.beta)) {
    throw std::domain_error("Laplace cumulant undefined for u <= -beta");
  }
  return -(seed.alpha / spec.leb()) * std::log1p(u / seed.beta);
}

std::complex<double> seed_cumulant_cf(const GammaSeed& seed, const TrawlSpec& spec, double u) {
  const std::complex<double> z(1.0, -u / seed.beta);
  return -(seed.alpha / spec.leb()) * std::log(z);
}

namespace {

template <typename Cumulant>
auto slice_sum(const TrawlSpec& spec, std::span<const double> times, std::span<const double> u,
               Cumulant cumulant) {
  if (times.size() != u.size()) {
    throw std::invalid_argument("times and arguments differ in length");
  }
  if (times.empty()) throw std::invalid_argument("at least one time point is required");
  const auto partition = slice_partition(spec, times);
  std::vector<double> prefix(u.size() + 1, 0.0);
  std::partial_sum(u.begin(), u.end(), prefix.begin() + 1);
  decltype(cumulant(0.0)) total{};
  for (const auto& s : partition.slices) {
    total += s.measure * cumulant(prefix[s.last + 1] - prefix[s.first]);
  }
  return total;
}

}  // namespace

double joint_laplace(const GammaSeed& seed, const TrawlSpec& spec, std::span<const double> times,
                     std::span<const double> u) {
  for (double v : u) {
    if (!(v >= 0.0)) throw std::invalid_argument("Laplace arguments must be nonnegative");
  }
  return std::exp(slice_sum(spec, times, u, [&](double v) { return seed_cumulant(seed, spec, v); }));
}

std::complex<double> joint_cf(const GammaSeed& seed, const TrawlSpec& spec,
                              std::span<const double> times, std::span<const double> u) {
  return std::exp(
      slice_sum(spec, times, u, [&](double v) { return seed_cumulant_cf(seed, spec, v); }));
}

std::vector<double> simulate_trawl(const GammaSeed& seed, const TrawlSpec& spec,
                                   std::span<const double> times, Rng& rng) {
  if (times.empty()) throw std::invalid_argument("simulate_trawl: no time points");
  if (!(seed.alpha > 0.0) || !(seed.beta > 0.0)) {
    throw std::invalid_argument("simulate_trawl: Gamma seed parameters must be positive");
  }
  if (!std::is_sorted(times.begin(), times.end())) {
    throw std::invalid_argument("simulate_trawl: times must be sorted");
  }

  std::vector<double> unique_times(times.begin(), times.end());
  unique_times.erase(std::unique(unique_times.begin(), unique_times.end()), unique_times.end());
  const std::size_t k = unique_times.size();
  const CohortGeometry geometry(spec, unique_times);
  const double shape_per_area = seed.alpha / spec.leb();
  const double lump_threshold = kLumpTolerance * spec.leb();

  std::vector<double> lambda(k, 0.0);
  std::vector<double> cohort;
  for (std::size_t i = 0; i < k; ++i) {
    cohort.clear();
    std::size_t j = i;
    for (; j < k; ++j) {
      if (geometry.alive(i, j) <= lump_threshold) break;
      cohort.push_back(rng.gamma(shape_per_area * geometry.slice(i, j), seed.beta));
    }
    if (j < k) {
      // Everything of cohort i still alive at t_j, split over its death times.
      double lump = rng.gamma(shape_per_area * geometry.alive(i, j), seed.beta);
      for (; j < k && lump > 0.0; ++j) {
        const double here = shape_per_area * geometry.slice(i, j);
        const double later = j + 1 < k ? shape_per_area * geometry.alive(i, j + 1) : 0.0;
        const double share = gamma_split(rng, here, later);
        cohort.push_back(lump * share);
        lump *= 1.0 - share;
      }
    }
    // Slice (i, i + m) contributes to Lambda_i, ..., Lambda_{i+m}.
    double alive = 0.0;
    for (std::size_t m = cohort.size(); m-- > 0;) {
      alive += cohort[m];
      lambda[i + m] += alive;
    }
  }

  if (k == times.size()) return lambda;
  std::vector<double> out(times.size());
  std::size_t u = 0;
  for (std::size_t n = 0; n < times.size(); ++n) {
    if (n > 0 && times[n] != times[n - 1]) ++u;
    out[n] = lambda[u];
  }
  return out;
}

std::vector<double> simulate_trawl(const GammaSeed& seed, const TrawlSpec& spec,
                                   std::span<const double> times, std::uint64_t rng_seed) {
  Rng rng(rng_seed);
  return simulate_trawl(seed, spec, times, rng);
}

std::vector<double> regular_grid(std::size_t n, double step) {
  std::vector<double> grid(n);
  for (std::size_t i = 0; i < n; ++i) grid[i] = static_cast<double>(i) * step;
  return grid;
}

}  // namespace ltrawl
