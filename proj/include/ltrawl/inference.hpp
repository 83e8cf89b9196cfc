#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ltrawl/model.hpp"

namespace ltrawl {

// ---------------------------------------------------------------------------
// Bivariate densities of (X_{t}, X_{t+h}) with respect to delta_0 + Lebesgue.
//
// With slice shapes b_own = alpha leb(A \ A_h)/leb(A), b_shared = alpha
// leb(A cap A_h)/leb(A), the joint Laplace transform of (Lambda_0, Lambda_h) is
//   L(u1, u2) = (1+u1/beta)^-b_own (1+(u1+u2)/beta)^-b_shared (1+u2/beta)^-b_own
// and every case below is a signed combination of L and its partial
// derivatives. These functions work on the latent scale (alpha, beta) of the
// given parameters; for MT parameters that is alpha = beta = 1.
// ---------------------------------------------------------------------------

// P(X_0 = 0, X_h = 0).
double pair_density_00(const ModelParams& params, double h);
// X_0 = x1 > 0, X_h = 0.
double pair_density_10(const ModelParams& params, double h, double x1);
// X_0 = 0, X_h = x2 > 0 (mirror of the 10 case).
double pair_density_01(const ModelParams& params, double h, double x2);
// X_0 = x1 > 0, X_h = x2 > 0.
double pair_density_11(const ModelParams& params, double h, double x1, double x2);
// Dispatches on which arguments are zero.
double pair_density(const ModelParams& params, double h, double x1, double x2);

// MT variant density at observed (z1, z2) >= 0, including the Jacobian of g^-1
// for each positive coordinate.
double pair_density_mt(const ModelParams& params, double h, double z1, double z2);

// log f(x1, x2) on the observation scale for either variant; -infinity when
// the density is not positive or an argument leaves the support.
double log_pair_density(const ModelParams& params, double h, double x1, double x2) noexcept;

// ---------------------------------------------------------------------------
// Pairwise likelihood
// ---------------------------------------------------------------------------

struct PLConfig {
  // Maximum index separation of a pair (on the sampling grid).
  int delta = 4;
  // Optimise in log coordinates for positive parameters (xi untransformed).
  bool transform = true;
  int simplex_max_iterations = 3000;
  double simplex_tolerance = 1e-7;
  int polish_max_iterations = 200;
  // On the gradient of the mean negative log pairwise likelihood.
  double gradient_tolerance = 1e-5;
  double gradient_step = 1e-5;
  double hessian_step = 1e-3;

  void validate() const;
};

// Admissible pairs of a series, grouped for fast repeated evaluation.
class PairwiseLikelihood {
 public:
  PairwiseLikelihood(const ExceedanceSeries& series, int delta);

  // Sum of log pair densities; -infinity if any pair density is not positive.
  double evaluate(const ModelParams& params) const;

  // As evaluate() but throws PairDensityError naming the first failing pair.
  double evaluate_checked(const ModelParams& params) const;

  // Per-observation contributions: entry i sums log f over pairs (i, j), j > i.
  std::vector<double> contributions(const ModelParams& params) const;

  std::size_t observations() const noexcept { return values_.size(); }
  std::size_t pair_count() const noexcept { return pair_count_; }
  int delta() const noexcept { return delta_; }

 private:
  struct Pair {
    std::uint32_t first;
    std::uint32_t second;
    double lag;
  };
  struct LagCount {
    double lag;
    std::size_t count;
  };

  std::vector<double> values_;
  std::vector<Pair> pairs_;          // every admissible pair, sorted by (i, j)
  std::vector<Pair> active_pairs_;   // pairs with at least one exceedance
  std::vector<LagCount> zero_pairs_; // both zero, grouped by lag
  std::size_t pair_count_ = 0;
  int delta_;
};

double log_pairwise_likelihood(const ExceedanceSeries& series, const ModelParams& params,
                               const PLConfig& config = {});

// Parameter map used by the optimiser: log for positive parameters, identity
// for xi. With config.transform == false the identity is used throughout.
std::array<double, 4> to_working(const ModelParams& params, bool transform);
ModelParams from_working(Variant variant, const std::array<double, 4>& eta, bool transform);

using Matrix4 = Eigen::Matrix4d;

struct SandwichResult {
  Matrix4 sensitivity;           // H: minus the Hessian of the mean log-PL (working coordinates)
  Matrix4 variability;           // J: long-run variance of per-observation scores
  Matrix4 working_covariance;    // H^-1 J H^-1 / k
  Matrix4 covariance;            // delta-method map to natural parameters
  std::size_t block_length = 0;
};

struct FitResult {
  ModelParams params;
  std::array<double, 4> estimate{};         // natural parameters
  std::array<double, 4> standard_error{};   // natural scale, NaN if no sandwich
  std::array<double, 4> working_estimate{}; // optimiser coordinates
  std::array<double, 4> working_standard_error{};
  Matrix4 covariance = Matrix4::Constant(std::numeric_limits<double>::quiet_NaN());
  Matrix4 working_covariance = Matrix4::Constant(std::numeric_limits<double>::quiet_NaN());
  double log_pl = 0.0;
  double gradient_norm = 0.0;
  int simplex_iterations = 0;
  int polish_iterations = 0;
  bool converged = false;
  std::string message;
};

// Mean log pairwise likelihood Hessian by Richardson extrapolation of central
// differences at steps `step` and `step / 2` (working coordinates).
Matrix4 log_pl_hessian(const PairwiseLikelihood& pl, const ModelParams& at, bool transform,
                       double step);

SandwichResult sandwich_covariance(const ExceedanceSeries& series, const ModelParams& estimate,
                                   const PLConfig& config = {});

// Moment-based starting values. Needs at least 10 exceedances.
struct InitConfig {
  double kappa_floor = 1e-4;
  double rho_floor = 1e-3;
  double rho_ceiling = 5.0;
  int max_lag = 10;
};
ModelParams init_heuristic(const ExceedanceSeries& series, Variant variant,
                           const InitConfig& config = {});

// Maximum pairwise likelihood: Nelder-Mead simplex from the starting point,
// then BFGS polish with central-difference gradients, then the sandwich
// covariance (left as NaN with a note in `message` if H is singular).
FitResult fit(const ExceedanceSeries& series, Variant variant, const PLConfig& config = {},
              std::optional<ModelParams> init = std::nullopt);

// Exact joint density of a short series via the 2^m expansion over its zero
// observations. Partial derivatives of the joint Laplace transform are exact
// by default; pass a step to use central differences instead.
double full_likelihood_small_k(const ExceedanceSeries& series, const ModelParams& params,
                               std::optional<double> finite_difference_step = std::nullopt);

inline constexpr std::size_t kFullLikelihoodMaxSize = 12;

}  // namespace ltrawl
