#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "erglab/regvar.hpp"

using namespace erglab;

namespace {

// Plain bisection on a monotone g with g(lo) < 0 < g(hi).
template <class G>
double bisect(G g, double lo, double hi) {
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

RegVarSpec ln_spec() { return RegVarSpec::power_log(0.0, 1.0, 1.5); }

}  // namespace

TEST_CASE("eval: power-log examples") {
  CHECK(eval(RegVarSpec::power_log(0.0, 1.0), std::numbers::e) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(eval(RegVarSpec::power_log(2.0, 0.0), 3.0) == doctest::Approx(9.0).epsilon(1e-14));
  const double e2 = std::exp(2.0);
  CHECK(eval(RegVarSpec::power_log(1.0, -1.0), e2) == doctest::Approx(e2 / 2.0).epsilon(1e-13));
  CHECK(e2 / 2.0 == doctest::Approx(3.6945).epsilon(1e-4));
}

TEST_CASE("eval: below the domain floor is an error") {
  CHECK_THROWS_AS(eval(ln_spec(), 1.0), std::domain_error);
  CHECK(eval_clamped(ln_spec(), 1.0) == doctest::Approx(std::log(1.5)));
  CHECK_THROWS_AS(RegVarSpec(PowerLog{0.0, 1.0, 0.0, 1.0}, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(RegVarSpec(PowerLog{0.0, 1.0, 1.0, 1.0}, 2.0), std::invalid_argument);
}

TEST_CASE("asymptotic_inverse examples") {
  CHECK(asymptotic_inverse(RegVarSpec::power_log(2.0, 0.0), 9.0) == doctest::Approx(3.0).epsilon(1e-11));
  CHECK(asymptotic_inverse(ln_spec(), 3.0) == doctest::Approx(std::exp(3.0)).epsilon(1e-11));

  const double oracle = bisect([](double x) { return x / std::log(x) - 100.0; }, 10.0, 1e4);
  CHECK(oracle == doctest::Approx(647.278).epsilon(1e-6));
  const double got = asymptotic_inverse(RegVarSpec::power_log(1.0, -1.0, 3.0), 100.0);
  CHECK(got == doctest::Approx(oracle).epsilon(1e-11));
}

TEST_CASE("asymptotic_inverse: bounded F exhausts the range") {
  // (ln x)^-1 decreases to 0, so it never exceeds 1.
  CHECK_THROWS_AS(asymptotic_inverse(RegVarSpec::power_log(0.0, -1.0, 3.0), 1.0), std::range_error);
}

TEST_CASE("inverse consistency on a grid") {
  const std::vector<RegVarSpec> specs{RegVarSpec::power_log(0.5, 1.0, 2.0),
                                      RegVarSpec::power_log(1.0, -1.0, 3.0), ln_spec(),
                                      RegVarSpec(PowerLog{0.0, 1.0, 1.0, 1.0}, 3.0)};
  for (const auto& spec : specs)
    for (double x = 10.0 * spec.x0(); x < 1e12; x *= 3.7) {
      const double back = asymptotic_inverse(spec, eval(spec, x));
      CHECK(back / x == doctest::Approx(1.0).epsilon(1e-6));
    }
}

TEST_CASE("erickson_scale examples") {
  CHECK(erickson_scale(ln_spec(), 1e4, 0.5) == doctest::Approx(100.0).epsilon(1e-10));
  CHECK(erickson_scale(ln_spec(), 1e6, 1.0 / 3.0) == doctest::Approx(100.0).epsilon(1e-10));

  // ln * ln ln
  const RegVarSpec L(PowerLog{0.0, 1.0, 1.0, 1.0}, 3.0);
  const double n = 1e6;
  const double target = 0.5 * std::log(n) * std::log(std::log(n));
  const double oracle =
      bisect([target](double t) { return std::log(t) * std::log(std::log(t)) - target; }, 3.0, n);
  const double a = erickson_scale(L, n, 0.5);
  CHECK(a == doctest::Approx(oracle).epsilon(1e-10));
  CHECK(a / n < 0.02);

  CHECK_THROWS(erickson_scale(RegVarSpec::power_log(1.0, 0.0), 100.0, 0.5));
  CHECK_THROWS(erickson_scale(ln_spec(), 100.0, 1.0));
}

TEST_CASE("erickson property: a_n(x)/n to 0 while a_n(x) grows") {
  const std::vector<RegVarSpec> specs{ln_spec(), RegVarSpec(PowerLog{0.0, 1.0, 1.0, 1.0}, 3.0)};
  for (const auto& L : specs)
    for (double x : {0.25, 0.5, 0.75}) {
      double prev_a = 0.0, prev_frac = 1.0;
      for (int j = 2; j <= 12; ++j) {
        const double n = std::pow(10.0, j);
        const double a = erickson_scale(L, n, x);
        CHECK(a > prev_a);
        CHECK(a / n < prev_frac);
        prev_a = a;
        prev_frac = a / n;
      }
      CHECK(prev_frac < 1e-2);
    }
}

TEST_CASE("slow variation: eval(lx)/eval(x) approaches 1") {
  const std::vector<RegVarSpec> specs{ln_spec(), RegVarSpec::power_log(0.0, -1.0, 1.5),
                                      RegVarSpec::power_log(0.0, 2.0, 1.5),
                                      RegVarSpec(PowerLog{0.0, 1.0, 1.0, 1.0}, 3.0)};
  for (const auto& spec : specs)
    for (double lambda : {2.0, 10.0}) {
      double prev = INFINITY;
      for (int j = 2; j <= 9; ++j) {
        const double x = std::pow(10.0, j);
        const double dev = std::abs(eval(spec, lambda * x) / eval(spec, x) - 1.0);
        CHECK(dev < prev);
        prev = dev;
      }
    }
}

TEST_CASE("uniform asymptotics along bounded ratios (k = 4)") {
  const std::vector<RegVarSpec> specs{ln_spec(), RegVarSpec(PowerLog{0.0, 1.0, 1.0, 1.0}, 3.0)};
  for (const auto& L : specs)
    for (double k : {4.0, 0.25}) {
      double prev = INFINITY;
      for (int j = 3; j <= 30; ++j) {
        const double q = std::pow(10.0, j);
        const double dev = std::abs(eval(L, k * q) / eval(L, q) - 1.0);
        CHECK(dev < prev);
        prev = dev;
      }
      CHECK(prev < 0.05);
    }
}

TEST_CASE("Karamata form: pure power reproduced with constant psi, zero zeta") {
  KaramataForm f{1.5, TabulatedFunction::constant(2.0), TabulatedFunction::constant(0.0), 1.0};
  const RegVarSpec spec(f, 1.0);
  for (double x : {1.0, 4.0, 100.0}) CHECK(eval(spec, x) == doctest::Approx(2.0 * std::pow(x, 1.5)));

  // zeta = 1/2 gives exp(int_1^x 1/(2t) dt) = sqrt(x)
  KaramataForm g{0.0, TabulatedFunction::constant(1.0), TabulatedFunction({1.0, 1e9}, {0.5, 0.5}), 1.0};
  const RegVarSpec spec2(g, 1.0);
  CHECK(eval(spec2, 100.0) == doctest::Approx(10.0).epsilon(1e-10));
  CHECK_THROWS_AS(RegVarSpec(KaramataForm{0.0, TabulatedFunction::constant(1.0),
                                          TabulatedFunction::constant(1.0), 1.0},
                             1.0),
                  std::invalid_argument);
}

TEST_CASE("Tauberian ratio: b = 1, rho = 1, L = 1") {
  const Sequence ones = [](std::uint64_t) { return 1.0; };
  const std::vector<std::uint64_t> ns{1, 10, 1000, 100000};
  const std::vector<double> ss{1e-1, 1e-2, 1e-3};
  const auto t = karamata_tauberian_ratio(ones, 1.0, RegVarSpec::power_log(0.0, 0.0), ns, ss);
  for (const auto& r : t.partial_sums) CHECK(r.ratio == doctest::Approx(1.0).epsilon(1e-14));
  // B(s) = 1/(1-e^-s); exact ratio s/(1-e^-s), ~ 1 + s/2
  for (const auto& r : t.laplace)
    CHECK(r.ratio == doctest::Approx(r.at / -std::expm1(-r.at)).epsilon(1e-12));
  CHECK(t.laplace.back().ratio == doctest::Approx(1.0005).epsilon(1e-6));
}

TEST_CASE("Tauberian ratio: b_k = (k+1)^-1/2 against direct summation") {
  const Sequence b = [](std::uint64_t k) { return 1.0 / std::sqrt(static_cast<double>(k + 1)); };
  const std::vector<std::uint64_t> ns{100, 10000, 1000000};
  const std::vector<double> ss{1e-2, 1e-4};
  const RegVarSpec one = RegVarSpec::power_log(0.0, 0.0);
  const auto t = karamata_tauberian_ratio(b, 0.5, one, ns, ss);
  for (const auto& r : t.partial_sums) {
    double direct = 0.0;
    for (std::uint64_t k = static_cast<std::uint64_t>(r.at); k-- > 0;) direct += b(k);
    CHECK(r.ratio == doctest::Approx(direct * std::tgamma(1.5) / std::sqrt(r.at)).epsilon(1e-10));
  }
  // sum ~ 2 sqrt(n), so the ratio tends to 2 Gamma(3/2) = sqrt(pi); B(s) ~ Gamma(1/2) s^-1/2
  CHECK(t.partial_sums.back().ratio == doctest::Approx(std::sqrt(std::numbers::pi)).epsilon(1e-3));
  CHECK(t.laplace.back().ratio == doctest::Approx(std::sqrt(std::numbers::pi)).epsilon(1e-2));
}

TEST_CASE("Karamata lemma ratio examples") {
  const std::vector<std::uint64_t> ns{1, 10, 1000, 100000};
  const auto r1 = karamata_lemma_ratio([](std::uint64_t) { return 1.0; }, 0.0, 0.0, ns);
  for (const auto& r : r1) CHECK(r.ratio == doctest::Approx(1.0));

  const auto r2 = karamata_lemma_ratio([](std::uint64_t k) { return double(k); }, 0.0, 1.0, ns);
  for (const auto& r : r2) CHECK(r.ratio == doctest::Approx(2.0 * r.at / (r.at + 1.0)).epsilon(1e-12));
  CHECK(r2.back().ratio == doctest::Approx(2.0).epsilon(1e-4));

  const auto sq = [](std::uint64_t k) { return double(k) * double(k); };
  const auto r3 = karamata_lemma_ratio(sq, 1.0, 2.0, ns);
  double direct = 0.0;
  for (std::uint64_t k = 1; k <= 100000; ++k) direct += double(k) * sq(k);
  CHECK(r3.back().ratio == doctest::Approx(1e10 * 1e10 / direct).epsilon(1e-10));
  CHECK(r3.back().ratio == doctest::Approx(4.0).epsilon(1e-3));

  CHECK_THROWS(karamata_lemma_ratio(sq, -4.0, 2.0, ns));
  CHECK_THROWS(karamata_lemma_ratio([](std::uint64_t) { return 0.0; }, 0.0, 0.0, ns));
}
