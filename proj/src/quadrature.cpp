#include "ltrawl/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>

#include "ltrawl/error.hpp"

namespace ltrawl {

namespace {

constexpr std::size_t kWorkspaceSize = 2000;

struct WorkspaceDeleter {
  void operator()(gsl_integration_workspace* w) const noexcept {
    gsl_integration_workspace_free(w);
  }
};

double trampoline(double x, void* params) {
  return (*static_cast<const std::function<double(double)>*>(params))(x);
}

}  // namespace

QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           double abs_tol, double rel_tol) {
  gsl_set_error_handler_off();
  std::unique_ptr<gsl_integration_workspace, WorkspaceDeleter> work(
      gsl_integration_workspace_alloc(kWorkspaceSize));
  gsl_function fn{&trampoline, const_cast<std::function<double(double)>*>(&f)};
  QuadratureResult r{0.0, 0.0};
  const int status =
      gsl_integration_qags(&fn, a, b, abs_tol, rel_tol, kWorkspaceSize, work.get(), &r.value, &r.error);
  // Roundoff and iteration-limit statuses still carry a usable estimate; the
  // caller judges it through the returned error.
  if (status != GSL_SUCCESS && status != GSL_EROUND && status != GSL_EMAXITER &&
      status != GSL_ESING && status != GSL_EDIVERGE) {
    throw QuadratureError(std::string("quadrature failed: ") + gsl_strerror(status), r.error);
  }
  if (!std::isfinite(r.value)) throw QuadratureError("quadrature produced a non-finite value", r.error);
  return r;
}

QuadratureResult integrate_to_infinity(const std::function<double(double)>& f, double a,
                                       double abs_tol, double rel_tol) {
  const std::function<double(double)> mapped = [&](double t) {
    if (t >= 1.0) return 0.0;
    const double s = 1.0 - t;
    return f(a + t / s) / (s * s);
  };
  return integrate(mapped, 0.0, 1.0, abs_tol, rel_tol);
}

QuadratureResult integrate_quadrant(const std::function<double(double, double)>& f, double a,
                                    double c, double abs_tol) {
  double inner_error = 0.0;
  const std::function<double(double)> outer = [&](double x) {
    const auto r = integrate_to_infinity([&](double y) { return f(x, y); }, c, abs_tol * 1e-2);
    inner_error = std::max(inner_error, r.error);
    return r.value;
  };
  auto r = integrate_to_infinity(outer, a, abs_tol);
  r.error += inner_error;
  return r;
}

}  // namespace ltrawl
