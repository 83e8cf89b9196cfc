#include <doctest.h>

#include <gsl/gsl_cdf.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "ltrawl/error.hpp"
#include "ltrawl/model.hpp"
#include "ltrawl/quadrature.hpp"
#include "ltrawl/trawl.hpp"
#include "oracles.hpp"

using namespace ltrawl;

namespace {

ModelParams table1() { return ModelParams::original(6.33, 20.12, 0.27, 12.18); }
ModelParams table2() { return ModelParams::marginal_transform(-0.11, 20.73, 0.17, 32.69); }

std::vector<double> positives(const ExceedanceSeries& s) {
  std::vector<double> out;
  for (double v : s.values) {
    if (v > 0.0) out.push_back(v);
  }
  return out;
}

}  // namespace

TEST_SUITE("model") {

TEST_CASE("parameter validation and natural coordinates") {
  CHECK_THROWS_AS(ModelParams::original(-1.0, 1.0, 0.2, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(ModelParams::original(1.0, 0.0, 0.2, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(ModelParams::original(1.0, 1.0, 0.2, -1.0), std::invalid_argument);
  CHECK_THROWS_AS(ModelParams::marginal_transform(0.1, -2.0, 0.2, 1.0), std::invalid_argument);
  const auto p = table1();
  CHECK(p.xi == doctest::Approx(1.0 / 6.33));
  CHECK(p.sigma == doctest::Approx(20.12 / 6.33));
  const auto n = p.natural();
  CHECK(n[0] == 6.33);
  CHECK(n[2] == 0.27);
  CHECK(ModelParams::from_natural(Variant::MarginalTransform, table2().natural()).sigma == 20.73);
  CHECK(variant_from_string("mt") == Variant::MarginalTransform);
  CHECK_THROWS_AS(variant_from_string("gev"), std::invalid_argument);
}

TEST_CASE("exceedance probability") {
  CHECK(exceedance_prob(ModelParams::original(2.0, 3.0, 0.5, 0.0)) == 1.0);
  CHECK(exceedance_prob(ModelParams::original(1.0, 1.0, 0.5, 1.0)) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(exceedance_prob(table1()) == doctest::Approx(std::pow(1.0 + 12.18 / 20.12, -6.33)).epsilon(1e-14));
  CHECK(exceedance_prob(table2()) == doctest::Approx(1.0 / 33.69).epsilon(1e-14));
  const double k = kappa_for_exceedance_prob(4.0, 4.0, 0.05);
  CHECK(std::abs(k - 4.45889) < 1e-4);
  CHECK(std::pow(1.0 + k / 4.0, -4.0) == doctest::Approx(0.05).epsilon(1e-13));
}

TEST_CASE("mean exceedance") {
  CHECK(mean_exceedance(ModelParams::original(2.0, 1.0, 0.5, 0.0)) == doctest::Approx(1.0).epsilon(1e-15));
  const double expect = std::pow(1.0 + 12.18 / 20.12, -6.33) * 32.30 / 5.33;
  CHECK(mean_exceedance(table1()) == doctest::Approx(expect).epsilon(1e-13));
  CHECK(std::abs(mean_exceedance(table1()) - 0.3030) < 1e-3);
  CHECK(mean_exceedance(ModelParams::original(3.0, 1.0, 0.5, 1e8)) < 1e-15);
  CHECK_THROWS_AS(mean_exceedance(ModelParams::original(1.0, 1.0, 0.5, 1.0)), std::domain_error);
}

TEST_CASE("exceedance series from raw values") {
  const std::vector<double> y{1.0, 2.0, 3.0};
  const auto s = ExceedanceSeries::from_raw({0.0, 1.0, 2.0}, y, 2.0);
  CHECK(s.values == std::vector<double>{0.0, 0.0, 1.0});
  CHECK(s.exceedances() == 1);
  CHECK(s.non_exceedances() == 2);
  const std::vector<double> tiny{0.1 + 0.2};
  CHECK(ExceedanceSeries::from_raw({0.0}, tiny, 0.3).values[0] == 0.0);
  CHECK_THROWS_AS(ExceedanceSeries::from_values({0.0, 0.0}, {1.0, 2.0}), std::invalid_argument);
  CHECK_THROWS_AS(ExceedanceSeries::from_values({0.0, 1.0}, {1.0, -2.0}), std::invalid_argument);
}

TEST_CASE("marginal transform") {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> ukappa(0.1, 40.0), uxi(-0.4, 0.6), usigma(0.5, 30.0);
  for (int rep = 0; rep < 50; ++rep) {
    const MarginalTransform g{ukappa(gen), uxi(gen), usigma(gen)};
    CHECK(g.forward(1e-14) < 1e-10);
    CHECK(g.forward(0.0) == 0.0);
    for (double x : {1e-3, 0.5, 3.0, 20.0, 150.0}) {
      const double z = g.forward(x);
      CHECK(g.inverse(z) == doctest::Approx(x).epsilon(1e-10));
      CHECK(g.forward(x * 1.01) > z);
      // J(z) = d g^-1 / dz.
      const double step = 1e-6 * std::max(z, 1e-3);
      if (g.target().in_support(z + step)) {
        const double fd = (g.inverse(z + step) - g.inverse(z - step)) / (2.0 * step);
        CHECK(g.jacobian(z) == doctest::Approx(fd).epsilon(1e-6));
        CHECK(g.jacobian(z) > 0.0);
      }
    }
  }
  const MarginalTransform identity{2.5, 1.0, 3.5};
  for (double x : {0.1, 1.0, 10.0}) CHECK(identity.forward(x) == doctest::Approx(x).epsilon(1e-13));
  const MarginalTransform bounded{32.69, -0.11, 20.73};
  CHECK_THROWS_AS(bounded.inverse(200.0), std::domain_error);
  CHECK_THROWS_AS(bounded.inverse(-1.0), std::domain_error);
}

TEST_CASE("joint exceedance survivor") {
  const auto p = table1();
  const auto s = pair_shapes(p.trawl, p.alpha, 1.0);
  const double b = p.beta, k = p.kappa;
  CHECK(joint_exceedance_survivor(p, 1.0, 0.0, 0.0) ==
        doctest::Approx(std::pow(1.0 + k / b, -2.0 * s.own) * std::pow(1.0 + 2.0 * k / b, -s.shared)).epsilon(1e-14));
  CHECK(joint_exceedance_survivor(p, 2.0, 1.5, 7.0) == joint_exceedance_survivor(p, 2.0, 7.0, 1.5));
  CHECK(joint_exceedance_survivor(p, 400.0, 1.5, 7.0) ==
        doctest::Approx(oracle::marginal_survivor(p, 1.5) * oracle::marginal_survivor(p, 7.0)).epsilon(1e-12));
  CHECK_THROWS_AS(joint_exceedance_survivor(p, 0.0, 1.0, 1.0), std::invalid_argument);
}

TEST_CASE("joint exceedance survivor against simulation") {
  const auto p = table1();
  const auto s = simulate_exceedances(p, regular_grid(400000), 31);
  std::vector<double> hits(s.size() - 1);
  for (std::size_t t = 0; t + 1 < s.size(); ++t) hits[t] = (s.values[t] > 2.0 && s.values[t + 1] > 1.0) ? 1.0 : 0.0;
  const double se = oracle::batch_se(hits, 100, [](const std::vector<double>& v) { return oracle::mean(v); });
  CHECK(std::abs(oracle::mean(hits) - joint_exceedance_survivor(p, 1.0, 2.0, 1.0)) < 4.0 * se);
}

TEST_CASE("simulated exceedances: frequency and marginal law") {
  const auto p = table1();
  // Grid spacing 40 makes the draws effectively independent (e^-10.8).
  const auto s = simulate_exceedances(p, regular_grid(100000, 40.0), 17);
  const double freq = static_cast<double>(s.exceedances()) / static_cast<double>(s.size());
  const double q = exceedance_prob(p);
  CHECK(std::abs(freq - q) < 4.0 * std::sqrt(q * (1.0 - q) / static_cast<double>(s.size())));
  const auto pos = positives(s);
  const Gpd g = p.latent_exceedance_gpd();
  CHECK(oracle::ks_statistic(pos, [&](double x) { return g.cdf(x); }) < oracle::ks_critical_1pct(pos.size()));

  const auto none = simulate_exceedances(ModelParams::original(6.33, 20.12, 0.27, 1e12), regular_grid(10000), 3);
  CHECK(none.exceedances() == 0);
}

TEST_CASE("MT simulated exceedances follow GPD(xi, sigma)") {
  const auto p = table2();
  const auto s = simulate_exceedances(p, regular_grid(300000, 60.0), 19);
  const auto pos = positives(s);
  const Gpd g{p.xi, p.sigma};
  for (double z : pos) CHECK_MESSAGE(g.in_support(z), z);
  CHECK(oracle::ks_statistic(pos, [&](double x) { return g.cdf(x); }) < oracle::ks_critical_1pct(pos.size()));
  const double q = exceedance_prob(p);
  const double freq = static_cast<double>(pos.size()) / static_cast<double>(s.size());
  CHECK(std::abs(freq - q) < 4.0 * std::sqrt(q * (1.0 - q) / static_cast<double>(s.size())));
}

TEST_CASE("autocovariance by quadrature") {
  const double kappa = kappa_for_exceedance_prob(4.0, 4.0, 0.05);
  const auto p = ModelParams::original(4.0, 4.0, 0.2, kappa);
  double prev = 1.0;
  for (double h : {1e-6, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0}) {
    const double r = acf_exceedance(p, h);
    CHECK(r < prev);
    CHECK(r > 0.0);
    prev = r;
  }
  CHECK(acf_exceedance(p, 1e-6) < 0.9);
  CHECK(std::abs(acov_exceedance(p, 200.0)) < 1e-9);
  CHECK_THROWS_AS(acov_exceedance(ModelParams::original(2.0, 4.0, 0.2, 1.0), 1.0), std::domain_error);
  CHECK_THROWS_AS(acov_exceedance(table2(), 1.0), std::invalid_argument);
  CHECK_THROWS_AS(acov_exceedance(p, 0.0), std::invalid_argument);

  // Independent check of E[X_0 X_h] = int int P(X_0 > a, X_h > b) da db.
  const auto t = table1();
  const double second =
      integrate_quadrant([&](double a, double b) { return joint_exceedance_survivor(t, 1.0, a, b); }, 0.0, 0.0, 1e-10)
          .value;
  CHECK(acov_exceedance(t, 1.0) + std::pow(mean_exceedance(t), 2) == doctest::Approx(second).epsilon(1e-7));
}

TEST_CASE("variance exceedance") {
  const auto p = table1();
  const Gpd g = p.latent_exceedance_gpd();
  const double q = exceedance_prob(p);
  const double m2 = 2.0 * g.scale * g.scale / ((1.0 - g.shape) * (1.0 - 2.0 * g.shape));
  CHECK(variance_exceedance(p) == doctest::Approx(q * m2 - std::pow(mean_exceedance(p), 2)).epsilon(1e-13));
}

}  // TEST_SUITE
