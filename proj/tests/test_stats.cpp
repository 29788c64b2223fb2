#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "erglab/limits.hpp"
#include "erglab/processes.hpp"
#include "erglab/stats.hpp"

using namespace erglab;

namespace {

// Brute force: both one-sided gaps at every sample point, by counting.
double ks_brute(std::vector<double> xs, const AlphaLaw& law) {
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double F = cdf(law, xs[i]);
    std::size_t below = 0, upto = 0;
    for (double y : xs) {
      below += y < xs[i];
      upto += y <= xs[i];
    }
    d = std::max({d, std::abs(upto / n - F), std::abs(below / n - F)});
  }
  return d;
}

}  // namespace

TEST_CASE("ks_distance examples") {
  CHECK(ks_distance(EmpiricalCDF({0.1, 0.5, 0.9}), Uniform01{}) == doctest::Approx(7.0 / 30.0).epsilon(1e-14));
  CHECK(ks_distance(EmpiricalCDF({0.5}), Uniform01{}) == doctest::Approx(0.5));
  for (std::size_t n : {1u, 7u, 100u}) {
    for (const AlphaLaw& law : {AlphaLaw{Xi{0.5}}, AlphaLaw{KacY{0.3}}}) {
      std::vector<double> q(n);
      for (std::size_t i = 0; i < n; ++i) q[i] = quantile(law, (i + 0.5) / n);
      CHECK(ks_distance(EmpiricalCDF(q), law) == doctest::Approx(0.5 / n).epsilon(1e-9));
    }
  }
}

TEST_CASE("ks_distance agrees with a brute-force evaluation") {
  Rng rng(77);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> xs(50);
    for (auto& x : xs) x = std::floor(rng.uniform() * 20) / 20;  // ties included
    CHECK(ks_distance(EmpiricalCDF(xs), Xi{0.4}) == doctest::Approx(ks_brute(xs, Xi{0.4})).epsilon(1e-14));
  }
}

TEST_CASE("KS against own ECDF is 0; probability-integral transform invariance") {
  Rng rng(4);
  std::vector<double> xs(5000);
  for (auto& x : xs) x = sample(KacX{0.3}, rng);
  const EmpiricalCDF e(xs);
  CHECK(ks_distance(e, DiscreteLaw(xs, std::vector<double>(xs.size(), 1.0 / xs.size()))) <= 1e-12);

  std::vector<double> us(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) us[i] = cdf(KacX{0.3}, xs[i]);
  CHECK(std::abs(ks_distance(e, KacX{0.3}) - ks_distance(EmpiricalCDF(us), Uniform01{})) <= 1e-12);
}

TEST_CASE("discrete laws") {
  const DiscreteLaw d({0.5, 0.1, 0.5, 0.9}, {0.25, 0.25, 0.25, 0.25});
  CHECK(d.atoms().size() == 3);
  CHECK(d.cdf(0.05) == 0.0);
  CHECK(d.cdf(0.5) == doctest::Approx(0.75));
  CHECK(d.quantile(0.5) == 0.5);
  CHECK(d.total_mass() == doctest::Approx(1.0));
  // Sup over atoms of the discrete law, approached from the left as well
  CHECK(ks_distance(DiscreteLaw({0.5}, {1.0}), Uniform01{}) == doctest::Approx(0.5));
  const double third = 1.0 / 3.0;
  CHECK(ks_distance(EmpiricalCDF({0.1, 0.5, 0.9}), DiscreteLaw({0.1, 0.5, 0.9}, {third, third, third})) <= 1e-15);
  CHECK_THROWS(DiscreteLaw({0.1}, {-1.0}));
  CHECK_THROWS(EmpiricalCDF({}));
}

TEST_CASE("dkw_bound examples") {
  CHECK(dkw_bound(1000, 0.95) == doctest::Approx(std::sqrt(std::log(40.0) / 2000.0)).epsilon(1e-14));
  CHECK(dkw_bound(1000, 0.95) == doctest::Approx(0.04295).epsilon(1e-4));
  CHECK(dkw_bound(2000, 0.95) < dkw_bound(1000, 0.95));
  CHECK(std::isfinite(dkw_bound(1000, 0.9999)));
  CHECK_THROWS_AS(dkw_bound(1000, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(dkw_bound(0, 0.95), std::invalid_argument);
}

TEST_CASE("DKW coverage over null trials") {
  int covered = 0;
  for (int t = 0; t < 200; ++t) {
    Rng rng = Rng::stream(2024, t);
    std::vector<double> xs(1000);
    for (auto& x : xs) x = rng.uniform();
    covered += ks_distance(EmpiricalCDF(xs), Uniform01{}) <= dkw_bound(1000, 0.95);
  }
  CHECK(covered >= 180);
}

TEST_CASE("sweep: null statistic") {
  const StatisticSampler uniform = [](std::uint64_t, Rng& rng) -> std::optional<double> { return rng.uniform(); };
  const std::vector<std::uint64_t> ns{10, 100, 1000, 10000};
  const auto v = convergence_sweep(uniform, Uniform01{}, ns, {20000, 0.05, 3, 2});
  CHECK(v.passed());
  for (const auto& r : v.rows) {
    CHECK(r.ks <= r.dkw95);
    CHECK(r.samples == 20000);
  }
}

TEST_CASE("sweep: Xi draws against Xi with a 3 DKW gate") {
  const StatisticSampler xi = [](std::uint64_t, Rng& rng) -> std::optional<double> { return sample(Xi{0.5}, rng); };
  const std::vector<std::uint64_t> ns{1, 2, 3};
  const auto v = convergence_sweep(xi, Xi{0.5}, ns, {10000, 3 * dkw_bound(10000, 0.95), 11, 0});
  CHECK(v.passed());
}

TEST_CASE("sweep: exact pmf resampling of Z_n/n approaches the arc-sine law") {
  const std::vector<std::uint64_t> ns{100, 1000, 10000};
  std::map<std::uint64_t, DiscreteLaw> laws;
  for (auto n : ns) {
    const auto pmf = exact_zn_pmf(PurePower{0.5}, n);
    std::vector<double> atoms(pmf.size());
    for (std::size_t k = 0; k < pmf.size(); ++k) atoms[k] = static_cast<double>(k) / n;
    laws.emplace(n, DiscreteLaw(atoms, pmf));
  }
  const StatisticSampler s = [&laws](std::uint64_t n, Rng& rng) -> std::optional<double> {
    return laws.at(n).quantile(rng.uniform());
  };
  const auto v = convergence_sweep(s, Xi{0.5}, ns, {100000, 0.02, 12, 0});
  REQUIRE(v.rows.size() == 3);
  CHECK(v.rows[0].ks > v.rows[1].ks);
  CHECK(v.rows[1].ks > v.rows[2].ks);
  CHECK(v.passed());
}

TEST_CASE("sweep verdict: trend allowance and gate") {
  std::vector<SweepRow> rows(3);
  rows[0] = {10, 100, 0, 0.10, 0.01};
  rows[1] = {20, 100, 0, 0.115, 0.01};  // within prev + both bands
  rows[2] = {30, 100, 0, 0.04, 0.01};
  auto v = sweep_verdict(rows, 0.05);
  CHECK(v.monotone_trend);
  CHECK(v.final_gate);
  rows[1].ks = 0.13;
  v = sweep_verdict(rows, 0.05);
  CHECK(!v.monotone_trend);
  CHECK(!v.rows[1].pass_trend);
  CHECK(!sweep_verdict(rows, 0.03).final_gate);
}

TEST_CASE("sweep: guards and censoring") {
  const StatisticSampler half = [](std::uint64_t, Rng& rng) -> std::optional<double> {
    const double u = rng.uniform();
    if (u < 0.5) return std::nullopt;
    return 2 * u - 1;
  };
  const std::vector<std::uint64_t> ns{1, 2, 3};
  const auto v = convergence_sweep(half, Uniform01{}, ns, {4000, 0.1, 1, 0});
  for (const auto& r : v.rows) CHECK(r.samples + r.censored == 4000);
  const std::vector<std::uint64_t> two{1, 2};
  CHECK_THROWS(convergence_sweep(half, Uniform01{}, two, {}));
  const std::vector<std::uint64_t> unsorted{1, 3, 2};
  CHECK_THROWS(convergence_sweep(half, Uniform01{}, unsorted, {}));
}

TEST_CASE("sweep results do not depend on the thread count") {
  const StatisticSampler xi = [](std::uint64_t n, Rng& rng) -> std::optional<double> {
    return std::pow(sample(Xi{0.5}, rng), 1.0 + 1.0 / static_cast<double>(n));
  };
  const std::vector<std::uint64_t> ns{1, 10, 100};
  const auto a = convergence_sweep(xi, Xi{0.5}, ns, {5000, 0.05, 99, 1});
  const auto b = convergence_sweep(xi, Xi{0.5}, ns, {5000, 0.05, 99, 4});
  for (std::size_t j = 0; j < 3; ++j) CHECK(a.rows[j].ks == b.rows[j].ks);
}

TEST_CASE("least squares and quantiles") {
  const std::vector<double> x{0, 1, 2, 3}, y{1, 3, 5, 7};
  const auto fit = least_squares(x, y);
  CHECK(fit.slope == doctest::Approx(2.0));
  CHECK(fit.intercept == doctest::Approx(1.0));
  CHECK(empirical_quantile({3, 1, 2, 4, 5}, 0.5) == doctest::Approx(3.0));
  CHECK(empirical_quantile({3, 1, 2, 4, 5}, 1.0) == doctest::Approx(5.0));
  CHECK_THROWS(least_squares(std::vector<double>{1, 1}, std::vector<double>{0, 1}));
}
