#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace ltrawl {

// One exponential component of a trawl height function.
struct TrawlTerm {
  double weight;  // w_i > 0
  double decay;   // rho_i > 0, 1/time
};

// Geometry of a (general) exponential trawl set
//   A = {(x, s) : s <= 0, 0 <= x <= sum_i w_i exp(rho_i s)}
// with weights summing to one. All dependence in the latent process is a
// function of this set through Lebesgue measures of intersections.
class TrawlSpec {
 public:
  // Throws std::invalid_argument unless every weight and decay is positive
  // and the weights sum to one within 1e-12.
  explicit TrawlSpec(std::vector<TrawlTerm> terms);

  static TrawlSpec exponential(double decay);

  std::span<const TrawlTerm> terms() const noexcept { return terms_; }
  std::size_t order() const noexcept { return terms_.size(); }

  // leb(A) = sum_i w_i / rho_i
  double leb() const noexcept { return leb_; }

  // leb(A cap A_h) = sum_i w_i exp(-rho_i h) / rho_i, h >= 0.
  double leb_intersection(double h) const;

  // leb(A) - leb(A cap A_h), evaluated without cancellation for small h.
  double leb_difference(double h) const;

  // Cor(Lambda_t, Lambda_{t+h}) = leb(A cap A_h) / leb(A).
  double acf(double h) const;

  // Single-decay convenience accessor; throws unless order() == 1.
  double decay() const;

 private:
  std::vector<TrawlTerm> terms_;
  double leb_ = 0.0;
};

double leb_trawl(const TrawlSpec& spec);
double leb_intersection(const TrawlSpec& spec, double h);
double acf_trawl(const TrawlSpec& spec, double h);

// Marginal law of the latent process: Lambda_t ~ Gamma(alpha, beta) (rate
// parametrisation). The seed attached to one unit of area is
// Gamma(alpha / leb(A), beta).
struct GammaSeed {
  double alpha;
  double beta;
};

// A slice is the part of the union of trawl sets that lies in exactly the sets
// A_{t_first}, ..., A_{t_last}. Indices are zero-based.
struct Slice {
  std::size_t first;
  std::size_t last;
  double measure;
};

struct SlicePartition {
  std::vector<double> times;
  std::vector<Slice> slices;

  double total_measure() const;
};

// Interval slice partition of the union of trawl sets at strictly increasing
// times. Because the height function decreases monotonically in the lag, a
// point lies in a contiguous range of the sets, so at most k(k+1)/2 slices are
// nonempty. Slice measures are returned even when tiny.
SlicePartition slice_partition(const TrawlSpec& spec, std::span<const double> times);

// Per-unit-area Laplace cumulant log E[exp(-u L')] = -(alpha/leb(A)) log(1 + u/beta).
// Valid on the analytic continuation u > -beta.
double seed_cumulant(const GammaSeed& seed, const TrawlSpec& spec, double u);

// Per-unit-area characteristic cumulant log E[exp(i u L')].
std::complex<double> seed_cumulant_cf(const GammaSeed& seed, const TrawlSpec& spec, double u);

// E[exp(-sum_j u_j Lambda_{t_j})], u_j >= 0.
double joint_laplace(const GammaSeed& seed, const TrawlSpec& spec,
                     std::span<const double> times, std::span<const double> u);

// E[exp(i sum_j u_j Lambda_{t_j})].
std::complex<double> joint_cf(const GammaSeed& seed, const TrawlSpec& spec,
                              std::span<const double> times, std::span<const double> u);

// Exact simulation of (Lambda_{t_1}, ..., Lambda_{t_k}) at sorted times.
// Repeated time stamps receive identical values.
std::vector<double> simulate_trawl(const GammaSeed& seed, const TrawlSpec& spec,
                                   std::span<const double> times, std::uint64_t rng_seed);

class Rng;
std::vector<double> simulate_trawl(const GammaSeed& seed, const TrawlSpec& spec,
                                   std::span<const double> times, Rng& rng);

// Regular grid 0, step, 2 step, ...
std::vector<double> regular_grid(std::size_t n, double step = 1.0);

}  // namespace ltrawl
