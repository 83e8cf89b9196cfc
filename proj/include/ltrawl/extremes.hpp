#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "ltrawl/model.hpp"

namespace ltrawl {

// F_2e(x) = P(X_0 <= x | X_0 > 0, X_h > 0), the common conditional law of
// either end of a jointly exceeding pair:
//   F_2e(x) = 1 - (1 + x/(beta + 2 kappa))^-b_shared (1 + x/(beta + kappa))^-b_own.
// For MT parameters x is on the observation scale and is mapped through g^-1.
double f2e(const ModelParams& params, double h, double x);

// Root of f2e(x) = p for p in [0, 1), by bracketed Newton with bisection
// fallback. The upper bracket doubles from beta + kappa.
double f2e_inverse(const ModelParams& params, double h, double p);

// Conditional tail dependence function
//   phi(h, u1, u2) = P(F_2e(X_h) > u2 | F_2e(X_0) > u1, X_0 > 0, X_h > 0).
// Rank based, so MT parameters are evaluated on the latent scale.
double cond_tail_dep(const ModelParams& params, double h, double u1, double u2);

struct TailDepCurve {
  double lag = 0.0;
  std::vector<double> levels;
  std::vector<double> values;  // phi(h, u, u)
};
TailDepCurve tail_dep_curve(const ModelParams& params, double h, std::span<const double> levels);

// phi(h) = lim_{u -> 1} phi(h, u, u) is zero for every lag: the model is
// asymptotically independent. The report carries the decay along u.
struct TailDecayReport {
  double limit = 0.0;
  TailDepCurve decay;
  double own_shape = 0.0;     // b_h; larger values decay faster
  double shared_shape = 0.0;  // b_{0,h}
  std::string note;
};
TailDecayReport cond_tail_dep_limit(const ModelParams& params, double h);

// Runs declustering: a cluster ends once `run_length` consecutive
// observations lie at or below the threshold. Missing values (NaN) count as
// non-exceedances.
struct ClusterSummary {
  double threshold = 0.0;
  int run_length = 3;
  std::size_t clusters = 0;
  std::size_t exceedances = 0;
  double theta = 1.0;  // clusters / exceedances
};
ClusterSummary extremal_index_runs(std::span<const double> values, double threshold,
                                   int run_length = 3);

struct ChiPoint {
  double level;
  double value;
  double standard_error;  // binomial
  std::size_t conditioning_count;
};

// chi(u) = P(F(X_{t+lag}) > u | F(X_t) > u) on the empirical rank scale
// (mid-ranks for ties). Needs at least 100 pairs.
std::vector<ChiPoint> empirical_chi(std::span<const double> values, std::span<const double> levels,
                                    std::size_t lag);

// Empirical phi(h, u, u): restricted to pairs with both values positive, each
// end ranked within those pairs. Needs at least 100 such pairs.
std::vector<ChiPoint> empirical_cond_tail_dep(std::span<const double> values,
                                              std::span<const double> levels, std::size_t lag);

}  // namespace ltrawl
