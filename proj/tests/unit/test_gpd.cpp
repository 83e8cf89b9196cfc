#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "ltrawl/gpd.hpp"
#include "ltrawl/quadrature.hpp"

using namespace ltrawl;

TEST_SUITE("gpd") {

TEST_CASE("basic values") {
  const auto g = Gpd::from_alpha_beta(1.0, 1.0);
  CHECK(g.shape == 1.0);
  CHECK(g.scale == 1.0);
  CHECK(gpd_cdf(0.0, g) == 0.0);
  CHECK(gpd_quantile(0.0, g) == 0.0);
  CHECK(gpd_cdf(1.0, g) == doctest::Approx(0.5).epsilon(1e-15));
  // (alpha/beta)(1 + x/beta)^-(alpha+1)
  const auto h = Gpd::from_alpha_beta(6.33, 32.30);
  CHECK(gpd_pdf(5.0, h) == doctest::Approx(6.33 / 32.30 * std::pow(1.0 + 5.0 / 32.30, -7.33)).epsilon(1e-13));
}

TEST_CASE("bounded support") {
  const Gpd g{-0.11, 20.73};
  const double end = 20.73 / 0.11;
  CHECK(g.upper_endpoint() == doctest::Approx(end).epsilon(1e-15));
  CHECK(std::abs(end - 188.45) < 0.01);
  CHECK(g.cdf(end) == doctest::Approx(1.0).epsilon(1e-15));
  // end - Q(1 - e) = end * e^0.11, so the quantiles approach the endpoint slowly.
  double gap = end;
  for (double e : {1e-3, 1e-6, 1e-9, 1e-12}) {
    const double q = g.quantile(1.0 - e);
    CHECK(end - q < gap);
    CHECK(end - q == doctest::Approx(end * std::pow(e, 0.11)).epsilon(1e-3));
    gap = end - q;
  }
  CHECK(g.quantile(1.0) == doctest::Approx(end).epsilon(1e-15));
  CHECK_THROWS_AS(g.cdf(end + 1.0), std::domain_error);
  CHECK_THROWS_AS(g.pdf(-0.1), std::domain_error);
  CHECK(std::isinf(g.log_pdf(end + 1.0)));
  CHECK(!g.in_support(-1.0));
  CHECK(std::isinf(Gpd{0.2, 1.0}.upper_endpoint()));
}

TEST_CASE("quantile inverts cdf") {
  for (const Gpd g : {Gpd{-0.11, 20.73}, Gpd{0.0, 2.0}, Gpd{0.3, 1.5}, Gpd{1e-10, 1.0}, Gpd{-0.9, 1.0}}) {
    for (double p = 0.01; p < 1.0; p += 0.07) {
      CHECK(g.cdf(g.quantile(p)) == doctest::Approx(p).epsilon(1e-12));
    }
    CHECK_THROWS_AS(g.quantile(1.5), std::domain_error);
    CHECK_THROWS_AS(g.quantile(-0.1), std::domain_error);
  }
}

TEST_CASE("exponential limit") {
  const Gpd e{0.0, 2.0};
  CHECK(e.cdf(3.0) == doctest::Approx(1.0 - std::exp(-1.5)).epsilon(1e-15));
  CHECK(e.pdf(3.0) == doctest::Approx(0.5 * std::exp(-1.5)).epsilon(1e-15));
  const Gpd near{1e-9, 2.0};
  CHECK(near.cdf(3.0) == doctest::Approx(e.cdf(3.0)).epsilon(1e-8));
  const Gpd small{1e-7, 2.0};
  CHECK(small.cdf(3.0) == doctest::Approx(e.cdf(3.0)).epsilon(1e-6));
}

TEST_CASE("density integrates to one") {
  for (const Gpd g : {Gpd{-0.11, 20.73}, Gpd{0.25, 3.0}, Gpd{0.0, 1.0}}) {
    const auto f = [&](double x) { return g.pdf(x); };
    const double total = std::isfinite(g.upper_endpoint())
                             ? integrate(f, 0.0, g.upper_endpoint(), 1e-12).value
                             : integrate_to_infinity(f, 0.0, 1e-12).value;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
  }
  CHECK_THROWS_AS((Gpd{0.1, -1.0}.cdf(1.0)), std::invalid_argument);
}

}  // TEST_SUITE
