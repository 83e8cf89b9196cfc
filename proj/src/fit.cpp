#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

#include "ltrawl/error.hpp"
#include "ltrawl/inference.hpp"
#include "working_objective.hpp"

namespace ltrawl {

namespace {

// Returned for points outside the parameter domain during the simplex stage.
constexpr double kPenalty = 1e10;

using Point = std::array<double, 4>;

struct VectorDeleter {
  void operator()(gsl_vector* v) const noexcept { gsl_vector_free(v); }
};
struct SimplexDeleter {
  void operator()(gsl_multimin_fminimizer* s) const noexcept { gsl_multimin_fminimizer_free(s); }
};
struct QuasiNewtonDeleter {
  void operator()(gsl_multimin_fdfminimizer* s) const noexcept {
    gsl_multimin_fdfminimizer_free(s);
  }
};
using VectorPtr = std::unique_ptr<gsl_vector, VectorDeleter>;

VectorPtr make_vector(const Point& p) {
  VectorPtr v(gsl_vector_alloc(4));
  for (std::size_t i = 0; i < 4; ++i) gsl_vector_set(v.get(), i, p[i]);
  return v;
}

Point to_point(const gsl_vector* v) {
  Point p;
  for (std::size_t i = 0; i < 4; ++i) p[i] = gsl_vector_get(v, i);
  return p;
}

// Negative mean log-PL in working coordinates with central-difference gradient.
struct Minimand {
  const detail::WorkingObjective& objective;
  double step;

  double value(const Point& eta) const {
    const double v = objective(eta);
    return std::isnan(v) ? kPenalty : -v;
  }

  Point gradient(const Point& eta) const {
    Point g;
    for (std::size_t i = 0; i < 4; ++i) {
      Point up = eta;
      Point down = eta;
      up[i] += step;
      down[i] -= step;
      g[i] = (value(up) - value(down)) / (2.0 * step);
    }
    return g;
  }

  static double f(const gsl_vector* x, void* self) {
    return static_cast<const Minimand*>(self)->value(to_point(x));
  }
  static void df(const gsl_vector* x, void* self, gsl_vector* g) {
    const auto grad = static_cast<const Minimand*>(self)->gradient(to_point(x));
    for (std::size_t i = 0; i < 4; ++i) gsl_vector_set(g, i, grad[i]);
  }
  static void fdf(const gsl_vector* x, void* self, double* value, gsl_vector* g) {
    *value = f(x, self);
    df(x, self, g);
  }
};

double norm(const Point& g) {
  double s = 0.0;
  for (double v : g) s += v * v;
  return std::sqrt(s);
}

Point simplex_steps(Variant variant, const Point& eta, bool transform) {
  Point steps;
  for (std::size_t i = 0; i < 4; ++i) {
    if (transform) {
      steps[i] = (i == 0 && variant == Variant::MarginalTransform) ? 0.05 : 0.2;
    } else {
      steps[i] = std::max(0.1 * std::abs(eta[i]), 0.02);
    }
  }
  return steps;
}

}  // namespace

FitResult fit(const ExceedanceSeries& series, Variant variant, const PLConfig& config,
              std::optional<ModelParams> init) {
  config.validate();
  series.validate();
  if (series.exceedances() < 2) throw std::invalid_argument("fit needs at least two exceedances");
  const ModelParams start = init ? *init : init_heuristic(series, variant);
  if (start.variant != variant) throw std::invalid_argument("initial parameters use another variant");
  if (start.trawl.order() != 1) throw std::invalid_argument("fit supports the exponential trawl only");

  gsl_set_error_handler_off();
  const PairwiseLikelihood pl(series, config.delta);
  const detail::WorkingObjective objective(pl, variant, config.transform);
  Minimand minimand{objective, config.gradient_step};

  FitResult result;
  Point eta = to_working(start, config.transform);

  // Stage 1: simplex.
  {
    gsl_multimin_function fn{&Minimand::f, 4, &minimand};
    std::unique_ptr<gsl_multimin_fminimizer, SimplexDeleter> nm(
        gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, 4));
    const auto x0 = make_vector(eta);
    const auto steps = make_vector(simplex_steps(variant, eta, config.transform));
    gsl_multimin_fminimizer_set(nm.get(), &fn, x0.get(), steps.get());
    int iter = 0;
    while (iter < config.simplex_max_iterations) {
      ++iter;
      if (gsl_multimin_fminimizer_iterate(nm.get()) != GSL_SUCCESS) break;
      if (gsl_multimin_test_size(gsl_multimin_fminimizer_size(nm.get()), config.simplex_tolerance) ==
          GSL_SUCCESS) {
        break;
      }
    }
    result.simplex_iterations = iter;
    eta = to_point(gsl_multimin_fminimizer_x(nm.get()));
  }

  // Stage 2: quasi-Newton polish.
  if (minimand.value(eta) >= kPenalty) {
    result.message = "simplex stage did not reach a feasible point";
  } else if (norm(minimand.gradient(eta)) >= config.gradient_tolerance) {
    gsl_multimin_function_fdf fdf{&Minimand::f, &Minimand::df, &Minimand::fdf, 4, &minimand};
    std::unique_ptr<gsl_multimin_fdfminimizer, QuasiNewtonDeleter> qn(
        gsl_multimin_fdfminimizer_alloc(gsl_multimin_fdfminimizer_vector_bfgs2, 4));
    const auto x0 = make_vector(eta);
    gsl_multimin_fdfminimizer_set(qn.get(), &fdf, x0.get(), 1e-2, 0.1);
    int iter = 0;
    while (iter < config.polish_max_iterations) {
      ++iter;
      const int status = gsl_multimin_fdfminimizer_iterate(qn.get());
      if (status != GSL_SUCCESS) break;
      if (gsl_multimin_test_gradient(gsl_multimin_fdfminimizer_gradient(qn.get()),
                                     config.gradient_tolerance) == GSL_SUCCESS) {
        break;
      }
    }
    result.polish_iterations = iter;
    const Point polished = to_point(gsl_multimin_fdfminimizer_x(qn.get()));
    if (minimand.value(polished) <= minimand.value(eta)) eta = polished;
  }

  result.params = from_working(variant, eta, config.transform);
  result.estimate = result.params.natural();
  result.working_estimate = to_working(result.params, true);
  result.log_pl = pl.evaluate(result.params);
  result.gradient_norm = norm(minimand.gradient(eta));
  result.converged = std::isfinite(result.log_pl) && result.gradient_norm < config.gradient_tolerance;
  if (!result.converged && result.message.empty()) {
    result.message = "gradient norm above tolerance after polish";
  }

  const double nan = std::numeric_limits<double>::quiet_NaN();
  result.standard_error.fill(nan);
  result.working_standard_error.fill(nan);
  try {
    PLConfig sandwich_config = config;
    sandwich_config.transform = true;
    const auto sandwich = sandwich_covariance(series, result.params, sandwich_config);
    result.covariance = sandwich.covariance;
    result.working_covariance = sandwich.working_covariance;
    for (std::size_t i = 0; i < 4; ++i) {
      result.standard_error[i] = std::sqrt(std::max(0.0, result.covariance(i, i)));
      result.working_standard_error[i] = std::sqrt(std::max(0.0, result.working_covariance(i, i)));
    }
  } catch (const Error& e) {
    if (!result.message.empty()) result.message += "; ";
    result.message += std::string("covariance unavailable: ") + e.what();
  }
  return result;
}

}  // namespace ltrawl
