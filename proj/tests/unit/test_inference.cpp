#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "ltrawl/error.hpp"
#include "ltrawl/inference.hpp"
#include "ltrawl/quadrature.hpp"
#include "ltrawl/trawl.hpp"
#include "oracles.hpp"

using namespace ltrawl;

namespace {

ModelParams table1() { return ModelParams::original(6.33, 20.12, 0.27, 12.18); }
ModelParams table2() { return ModelParams::marginal_transform(-0.11, 20.73, 0.17, 32.69); }
ModelParams busy() { return ModelParams::original(3.0, 2.0, 0.5, 1.0); }

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

// d/dx of P(X_0 > x, X_h = 0) = P(X_0 > x) - P(X_0 > x, X_h > 0), negated.
double f10_from_survivor(const ModelParams& p, double h, double x) {
  const auto g = [&](double v) { return oracle::marginal_survivor(p, v) - joint_exceedance_survivor(p, h, v, 0.0); };
  const double step = 1e-5 * std::max(x, 1.0);
  return -(g(x + step) - g(x - step)) / (2.0 * step);
}

double f11_from_survivor(const ModelParams& p, double h, double a, double b) {
  const double sa = 1e-4 * std::max(a, 1.0);
  const double sb = 1e-4 * std::max(b, 1.0);
  const auto s = [&](double x, double y) { return joint_exceedance_survivor(p, h, x, y); };
  return (s(a + sa, b + sb) - s(a + sa, b - sb) - s(a - sa, b + sb) + s(a - sa, b - sb)) / (4.0 * sa * sb);
}

double box_integral(const std::function<double(double, double)>& f, double hi) {
  return integrate(
             [&](double x) { return integrate([&](double y) { return f(x, y); }, 0.0, hi, 1e-12, 1e-10).value; },
             0.0, hi, 1e-10, 1e-10)
      .value;
}

ExceedanceSeries sim(const ModelParams& p, std::size_t n, std::uint64_t seed) {
  return simulate_exceedances(p, regular_grid(n), seed);
}

}  // namespace

TEST_SUITE("inference") {

TEST_CASE("pair densities equal the literal Appendix B formulas") {
  for (const auto& p : {table1(), busy(), ModelParams::original(0.7, 5.0, 2.0, 0.3)}) {
    for (double h : {0.3, 1.0, 4.0}) {
      const oracle::AppendixB b(p, h);
      CHECK(rel(pair_density_00(p, h), b.f00()) < 1e-12);
      for (double x : {0.01, 1.0, 7.0, 80.0}) {
        CHECK(rel(pair_density_10(p, h, x), b.f10(x)) < 1e-10);
        CHECK(pair_density_01(p, h, x) == pair_density_10(p, h, x));
        for (double y : {0.2, 3.0, 40.0}) CHECK(rel(pair_density_11(p, h, x, y), b.f11(x, y)) < 1e-10);
      }
    }
  }
}

TEST_CASE("pair densities as derivatives of the joint survivor") {
  const auto p = table1();
  for (double h : {0.5, 1.0, 4.0}) {
    for (double x : {0.1, 1.0, 5.0, 20.0, 60.0}) {
      CHECK(rel(pair_density_10(p, h, x), f10_from_survivor(p, h, x)) < 1e-5);
      for (double y : {0.1, 1.0, 5.0, 20.0, 60.0}) {
        CHECK(rel(pair_density_11(p, h, x, y), f11_from_survivor(p, h, x, y)) < 1e-5);
        CHECK(pair_density_11(p, h, x, y) == pair_density_11(p, h, y, x));
      }
    }
  }
}

TEST_CASE("pair densities: limits and errors") {
  const auto p = table1();
  const double q = exceedance_prob(p);
  const auto zero_kappa = ModelParams::original(6.33, 20.12, 0.27, 0.0);
  CHECK(std::abs(pair_density_00(zero_kappa, 1.0)) < 1e-15);
  // leb(A cap A_h)/leb(A) = e^-27 < 1e-9 at h = 100.
  CHECK(rel(pair_density_00(p, 100.0), (1 - q) * (1 - q)) < 1e-6);
  for (double x : {0.5, 10.0}) {
    CHECK(rel(pair_density_10(p, 100.0, x), oracle::marginal_density(p, x) * (1 - q)) < 1e-6);
    CHECK(rel(pair_density_11(p, 100.0, x, 2.0), oracle::marginal_density(p, x) * oracle::marginal_density(p, 2.0)) < 1e-6);
  }
  CHECK_THROWS_AS(pair_density_00(p, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(pair_density_10(p, 1.0, 0.0), std::domain_error);
  CHECK_THROWS_AS(pair_density_11(p, 1.0, 1.0, -1.0), std::domain_error);
}

TEST_CASE("pair densities carry total mass one") {
  for (const auto& p : {table1(), busy()}) {
    for (double h : {0.5, 2.0}) {
      const double f00 = pair_density_00(p, h);
      const double f10 = integrate_to_infinity([&](double x) { return pair_density_10(p, h, x); }, 0.0, 1e-12).value;
      const double f11 =
          integrate_quadrant([&](double x, double y) { return pair_density_11(p, h, x, y); }, 0.0, 0.0, 1e-10).value;
      CHECK(std::abs(f00 + f10 - (1.0 - exceedance_prob(p))) < 1e-8);
      CHECK(std::abs(f00 + 2.0 * f10 + f11 - 1.0) < 1e-6);
    }
  }
}

TEST_CASE("MT pair densities") {
  const double kappa = 2.5;
  const auto mt = ModelParams::marginal_transform(1.0, 1.0 + kappa, 0.4, kappa);
  const auto orig = ModelParams::original(1.0, 1.0, 0.4, kappa);
  for (double z1 : {0.0, 0.3, 4.0}) {
    for (double z2 : {0.0, 1.0, 9.0}) {
      CHECK(rel(pair_density_mt(mt, 1.0, z1, z2), pair_density(orig, 1.0, z1, z2)) < 1e-10);
    }
  }

  const auto p = table2();
  const double end = Gpd{p.xi, p.sigma}.upper_endpoint();
  const double h = 1.0;
  const double f00 = pair_density_mt(p, h, 0.0, 0.0);
  const double f10 = integrate([&](double z) { return pair_density_mt(p, h, z, 0.0); }, 0.0, end, 1e-13, 1e-11).value;
  const double f11 = box_integral([&](double a, double b) { return pair_density_mt(p, h, a, b); }, end);
  CHECK(std::abs(f00 + 2.0 * f10 + f11 - 1.0) < 1e-6);

  for (double z1 : {0.5, 20.0, 120.0}) {
    const double integrated =
        pair_density_mt(p, h, z1, 0.0) +
        integrate([&](double z) { return pair_density_mt(p, h, z1, z); }, 0.0, end, 1e-14, 1e-11).value;
    CHECK(rel(integrated, Gpd{p.xi, p.sigma}.pdf(z1) / (1.0 + p.kappa)) < 1e-6);
  }
  CHECK_THROWS_AS(pair_density_mt(p, h, end + 1.0, 0.0), std::domain_error);
  CHECK_THROWS_AS(pair_density_mt(table1(), h, 1.0, 0.0), std::invalid_argument);
  CHECK(std::isinf(log_pair_density(p, h, end + 1.0, 0.0)));
  CHECK(log_pair_density(p, h, 3.0, 7.0) == doctest::Approx(std::log(pair_density_mt(p, h, 3.0, 7.0))).epsilon(1e-12));
}

TEST_CASE("pairwise likelihood sums") {
  const auto p = busy();
  const auto two = ExceedanceSeries::from_values({0.0, 1.5}, {0.7, 0.0});
  CHECK(log_pairwise_likelihood(two, p) == doctest::Approx(std::log(pair_density_10(p, 1.5, 0.7))).epsilon(1e-13));

  const auto s = simulate_exceedances(p, std::vector<double>{0.0, 0.4, 1.7, 2.0, 3.1, 4.0, 4.2, 6.0}, 5);
  double all = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    for (std::size_t j = i + 1; j < s.size(); ++j) {
      all += std::log(pair_density(p, s.times[j] - s.times[i], s.values[i], s.values[j]));
    }
  }
  PLConfig c;
  for (int d : {7, 10}) {
    c.delta = d;
    CHECK(log_pairwise_likelihood(s, p, c) == doctest::Approx(all).epsilon(1e-12));
  }

  // Index separation on the positions: gaps remove pairs.
  const auto gapped = ExceedanceSeries::from_values({0.0, 1.0, 5.0, 6.0}, {0.3, 0.0, 1.2, 0.4}, 0.0, {0, 1, 5, 6});
  c.delta = 2;
  const double expect = std::log(pair_density(p, 1.0, 0.3, 0.0)) + std::log(pair_density(p, 1.0, 1.2, 0.4));
  const PairwiseLikelihood pl(gapped, 2);
  CHECK(pl.pair_count() == 2);
  CHECK(pl.evaluate(p) == doctest::Approx(expect).epsilon(1e-13));
  const auto contrib = pl.contributions(p);
  CHECK(contrib[0] + contrib[2] == doctest::Approx(expect).epsilon(1e-13));

  PLConfig bad;
  bad.delta = 0;
  CHECK_THROWS_AS(log_pairwise_likelihood(s, p, bad), std::invalid_argument);
}

TEST_CASE("pairwise likelihood reports failing pairs") {
  const auto p = table2();
  const auto s = ExceedanceSeries::from_values({0.0, 1.0, 2.0}, {3.0, 0.0, 500.0});
  CHECK(std::isinf(PairwiseLikelihood(s, 4).evaluate(p)));
  try {
    (void)log_pairwise_likelihood(s, p);
    FAIL("expected PairDensityError");
  } catch (const PairDensityError& e) {
    CHECK(e.first() == 0);
    CHECK(e.second() == 2);
  }
}

TEST_CASE("true parameters beat perturbed ones on average") {
  const auto truth = table1();
  const std::array<ModelParams, 4> perturbed{
      ModelParams::original(6.33 * 1.3, 20.12, 0.27, 12.18), ModelParams::original(6.33, 20.12 * 0.7, 0.27, 12.18),
      ModelParams::original(6.33, 20.12, 0.27 * 1.6, 12.18), ModelParams::original(6.33, 20.12, 0.27, 12.18 * 1.2)};
  std::array<double, 4> gain{};
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const PairwiseLikelihood pl(sim(truth, 5000, 1000 + seed), 4);
    const double at_truth = pl.evaluate(truth);
    for (std::size_t i = 0; i < 4; ++i) gain[i] += at_truth - pl.evaluate(perturbed[i]);
  }
  for (double g : gain) CHECK(g > 0.0);
}

TEST_CASE("working coordinates") {
  const auto p = table1();
  const auto eta = to_working(p, true);
  CHECK(eta[0] == doctest::Approx(std::log(6.33)));
  const auto back = from_working(Variant::Original, eta, true);
  for (std::size_t i = 0; i < 4; ++i) CHECK(back.natural()[i] == doctest::Approx(p.natural()[i]).epsilon(1e-14));
  const auto m = to_working(table2(), true);
  CHECK(m[0] == -0.11);
  CHECK(from_working(Variant::MarginalTransform, to_working(table2(), false), false).sigma == 20.73);
}

TEST_CASE("fit: stationarity at the maximiser and transform invariance") {
  const auto data = sim(table1(), 20000, 77);
  const auto first = fit(data, Variant::Original);
  CHECK(first.converged);
  const auto again = fit(data, Variant::Original, {}, first.params);
  CHECK(again.converged);
  CHECK(again.polish_iterations <= 5);
  CHECK(again.gradient_norm < 1e-5);
  for (std::size_t i = 0; i < 4; ++i) CHECK(again.estimate[i] == doctest::Approx(first.estimate[i]).epsilon(1e-4));

  PLConfig raw;
  raw.transform = false;
  const auto natural = fit(data, Variant::Original, raw, first.params);
  for (std::size_t i = 0; i < 4; ++i) CHECK(natural.estimate[i] == doctest::Approx(first.estimate[i]).epsilon(2e-3));

  const auto cov = first.covariance;
  CHECK((cov - cov.transpose()).norm() == 0.0);
  const Eigen::SelfAdjointEigenSolver<Matrix4> eig(cov);
  CHECK(eig.eigenvalues().minCoeff() >= 0.0);
  for (int i = 0; i < 4; ++i) CHECK(cov(i, i) > 0.0);

  const auto few = ExceedanceSeries::from_values({0.0, 1.0, 2.0}, {0.0, 1.0, 0.0});
  CHECK_THROWS_AS(fit(few, Variant::Original), std::invalid_argument);
}

TEST_CASE("sandwich: Hessian cross-check and singular detection") {
  const auto data = sim(table1(), 10000, 5);
  const auto est = fit(data, Variant::Original).params;
  const PLConfig cfg;
  const auto sw = sandwich_covariance(data, est, cfg);
  const PairwiseLikelihood pl(data, cfg.delta);
  const auto eta = to_working(est, true);
  const double k = static_cast<double>(data.size());
  const auto f = [&](std::array<double, 4> e) { return pl.evaluate(from_working(Variant::Original, e, true)) / k; };
  Matrix4 fd;
  const double h = 1e-4;
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 4; ++j) {
      auto pp = eta, pm = eta, mp = eta, mm = eta;
      pp[i] += h, pp[j] += h;
      pm[i] += h, pm[j] -= h;
      mp[i] -= h, mp[j] += h;
      mm[i] -= h, mm[j] -= h;
      fd(static_cast<int>(i), static_cast<int>(j)) = -(f(pp) - f(pm) - f(mp) + f(mm)) / (4.0 * h * h);
    }
  }
  CHECK((sw.sensitivity - fd).norm() / fd.norm() < 1e-4);
  CHECK(sw.block_length >= 4);
  for (int i = 0; i < 4; ++i) CHECK(sw.covariance(i, i) > 0.0);

  // e^{-rho h} underflows, so rho no longer enters the objective.
  const auto flat = ModelParams::original(est.alpha, est.beta, 1000.0, est.kappa);
  CHECK_THROWS_AS(sandwich_covariance(data, flat, cfg), SingularMatrixError);
}

TEST_CASE("init heuristic") {
  const auto truth = table1();
  std::vector<std::array<double, 4>> ratios;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto init = init_heuristic(sim(truth, 50000, 500 + seed), Variant::Original).natural();
    std::array<double, 4> r{};
    for (std::size_t i = 0; i < 4; ++i) r[i] = init[i] / truth.natural()[i];
    ratios.push_back(r);
  }
  for (std::size_t i = 0; i < 4; ++i) {
    std::vector<double> col;
    for (const auto& r : ratios) col.push_back(r[i]);
    std::nth_element(col.begin(), col.begin() + 10, col.end());
    CHECK(col[10] > 0.5);
    CHECK(col[10] < 2.0);
  }

  std::mt19937_64 gen(1);
  std::exponential_distribution<double> expo(0.5);
  std::uniform_real_distribution<double> unif;
  std::vector<double> all_pos(2000), iid(20000);
  for (auto& v : all_pos) v = expo(gen);
  for (auto& v : iid) v = unif(gen) < 0.05 ? expo(gen) : 0.0;
  const auto pos_init = init_heuristic(ExceedanceSeries::from_values(regular_grid(2000), all_pos), Variant::Original);
  CHECK(pos_init.kappa == doctest::Approx(1e-4));
  const auto iid_init = init_heuristic(ExceedanceSeries::from_values(regular_grid(20000), iid), Variant::Original);
  CHECK(iid_init.trawl.decay() == doctest::Approx(5.0));
  const auto mt_init = init_heuristic(sim(table2(), 50000, 3), Variant::MarginalTransform);
  CHECK(mt_init.variant == Variant::MarginalTransform);

  const auto few = ExceedanceSeries::from_values(regular_grid(5), {1.0, 0.0, 2.0, 0.0, 1.0});
  CHECK_THROWS_AS(init_heuristic(few, Variant::Original), std::invalid_argument);
}

TEST_CASE("full likelihood: small cases") {
  for (const auto& p : {table1(), busy(), table2()}) {
    const double h = 1.3;
    for (const auto& xy : std::vector<std::array<double, 2>>{{0.0, 0.0}, {2.0, 0.0}, {0.0, 0.4}, {1.1, 6.0}}) {
      const auto s = ExceedanceSeries::from_values({0.0, h}, {xy[0], xy[1]});
      const double pair = p.variant == Variant::Original ? pair_density(p, h, xy[0], xy[1])
                                                          : pair_density_mt(p, h, xy[0], xy[1]);
      CHECK(rel(full_likelihood_small_k(s, p), pair) < 1e-5);
      if (p.variant == Variant::Original) CHECK(rel(full_likelihood_small_k(s, p, 1e-5), pair) < 1e-3);
    }
    const auto one = ExceedanceSeries::from_values({0.0}, {0.0});
    CHECK(full_likelihood_small_k(one, p) == doctest::Approx(1.0 - exceedance_prob(p)).epsilon(1e-13));
  }
  const auto big = ExceedanceSeries::from_values(regular_grid(13), std::vector<double>(13, 0.0));
  CHECK_THROWS_AS(full_likelihood_small_k(big, table1()), std::invalid_argument);
}

TEST_CASE("full likelihood: marginalising the last observation") {
  const auto p = busy();
  const std::vector<double> t{0.0, 1.0, 2.5};
  for (double x1 : {0.0, 0.8}) {
    for (double x2 : {0.0, 1.7}) {
      const auto joint = [&](double x3) {
        return full_likelihood_small_k(ExceedanceSeries::from_values(t, {x1, x2, x3}), p);
      };
      const double total = joint(0.0) + integrate_to_infinity(joint, 0.0, 1e-12, 1e-10).value;
      CHECK(rel(total, pair_density(p, 1.0, x1, x2)) < 1e-6);
    }
  }
  // Twelve points with mixed zeros and exceedances reduce to eleven.
  const auto t12 = regular_grid(12, 0.5);
  std::vector<double> x12{0.3, 0.0, 0.0, 1.1, 0.0, 2.0, 0.0, 0.0, 0.7, 0.0, 0.4, 0.0};
  const auto last_zero = full_likelihood_small_k(ExceedanceSeries::from_values(t12, x12), p);
  x12.back() = 0.0;
  std::vector<double> t11(t12.begin(), t12.end() - 1), x11(x12.begin(), x12.end() - 1);
  const auto f = [&](double x) {
    auto v = x12;
    v.back() = x;
    return full_likelihood_small_k(ExceedanceSeries::from_values(t12, v), p);
  };
  const double marg = last_zero + integrate_to_infinity(f, 0.0, 1e-16, 1e-9).value;
  CHECK(rel(marg, full_likelihood_small_k(ExceedanceSeries::from_values(t11, x11), p)) < 1e-6);
}

TEST_CASE("full likelihood: pattern probability against simulation") {
  const auto p = busy();
  const std::vector<double> t{0.0, 1.0, 2.0};
  const auto f = [&](double a, double b) {
    return full_likelihood_small_k(ExceedanceSeries::from_values(t, {a, 0.0, b}), p);
  };
  const double prob = integrate_quadrant(f, 0.0, 0.0, 1e-10).value;
  const auto s = sim(p, 600000, 99);
  std::vector<double> hit(s.size() - 2);
  for (std::size_t i = 0; i + 2 < s.size(); ++i) {
    hit[i] = (s.values[i] > 0.0 && s.values[i + 1] == 0.0 && s.values[i + 2] > 0.0) ? 1.0 : 0.0;
  }
  const double se = oracle::batch_se(hit, 100, [](const std::vector<double>& v) { return oracle::mean(v); });
  CHECK(std::abs(oracle::mean(hit) - prob) < 4.0 * se);
}

}  // TEST_SUITE
