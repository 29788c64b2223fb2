#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "erglab/dynamics.hpp"

using namespace erglab;

namespace {

double thaler_f(double x) { return x + x * x * std::exp(-1.0 / x); }

}  // namespace

TEST_CASE("Thaler branch point") {
  CHECK(thaler_f(1.0) == doctest::Approx(1.0 + std::exp(-1.0)));
  CHECK(thaler_f(1.0) > 1.0);
  CHECK(thaler_f(0.5) == doctest::Approx(0.5 + 0.25 * std::exp(-2.0)));
  CHECK(thaler_f(0.5) < 1.0);

  double lo = 0.5, hi = 1.0;
  while (hi - lo > 1e-15) {
    const double mid = 0.5 * (lo + hi);
    (thaler_f(mid) < 1.0 ? lo : hi) = mid;
  }
  const double a = thaler_branch_point();
  CHECK(a == doctest::Approx(0.80949).epsilon(1e-5));
  CHECK(std::abs(a - lo) < 1e-14);
  CHECK(std::abs(thaler_f(a) - 1.0) <= 1e-14);
  CHECK(ThalerMap{}.branch_point() == a);
}

TEST_CASE("map_eval examples") {
  const IntervalMap ly = LasotaYorkeMap{};
  CHECK(map_eval(ly, 0.25) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(map_eval(ly, 0.75) == 0.5);
  CHECK(map_eval(ly, 0.5) == 1.0);
  CHECK(map_eval(ly, 1.0) == 1.0);
  CHECK(map_eval(ly, 0.0) == 0.0);
  const IntervalMap th = ThalerMap{};
  CHECK(map_eval(th, 0.0) == 0.0);
  CHECK(map_eval(th, 1.0) == doctest::Approx(1.0));
  CHECK(map_eval(th, thaler_branch_point()) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK_THROWS_AS(map_eval(ly, -0.1), std::domain_error);
  CHECK_THROWS_AS(map_eval(th, 1.5), std::domain_error);
  CHECK(map_name(ly) == "lasota_yorke");
}

TEST_CASE("branches are strictly increasing and onto [0,1]") {
  const ThalerMap th;
  const LasotaYorkeMap ly;
  auto check = [](const auto& m) {
    for (int b = 0; b < 2; ++b) {
      const auto d = m.branches()[b];
      double prev = -1.0;
      const int N = 10000;
      for (int i = 1; i <= N; ++i) {
        const double x = d.lo + (d.hi - d.lo) * i / N;
        const double y = m.branch_eval(b, x);
        CHECK(y > prev);
        prev = y;
      }
      CHECK(std::abs(m.branch_eval(b, d.lo)) <= 1e-12);
      CHECK(std::abs(m.branch_eval(b, d.hi) - 1.0) <= 1e-12);
    }
  };
  check(th);
  check(ly);
}

TEST_CASE("branch inverses") {
  const ThalerMap th;
  const LasotaYorkeMap ly;
  for (double y : {0.0, 0.1, 0.37, 0.9, 1.0})
    for (int b = 0; b < 2; ++b) {
      CHECK(ly.branch_eval(b, ly.branch_inverse(b, y)) == doctest::Approx(y).epsilon(1e-14));
      CHECK(th.branch_eval(b, th.branch_inverse(b, y)) == doctest::Approx(y).epsilon(1e-12));
    }
  CHECK(ly.branch_inverse(0, 0.5) == doctest::Approx(1.0 / 3.0));
  CHECK(ly.branch_inverse(1, 0.5) == 0.75);
}

TEST_CASE("indifferent fixed point at 0") {
  const ThalerMap th;
  const LasotaYorkeMap ly;
  for (double x = 0.1; x > 1e-3; x *= 0.5) {
    CHECK((ly(x) - x) / (x * x) == doctest::Approx(1.0 / (1.0 - x)));
    CHECK((th(x) - x) / x < 2.0 * x);
  }
  // (T(x) - x)/x^2 e^{1/x} -> 1; below ~0.05 the increment drops under one ulp of x
  for (double x : {0.2, 0.1, 0.05}) CHECK((th(x) - x) / (x * x) * std::exp(1.0 / x) == doctest::Approx(1.0));
}

TEST_CASE("return_time examples") {
  const IntervalMap ly = LasotaYorkeMap{};
  const Interval A{0.5, 1.0};
  auto r = return_time(ly, A, 0.75, 100);
  CHECK(r.phi == 1);
  CHECK(!r.exceeded);
  CHECK(r.point == 0.5);
  // The double nearest 1/3 sits below 1/3 and maps just under 1/2; the next
  // double up is the faithful stand-in for x = 1/3.
  CHECK(map_eval(ly, 1.0 / 3.0) < 0.5);
  r = return_time(ly, A, std::nextafter(1.0 / 3.0, 1.0), 100);
  CHECK(r.phi == 1);
  CHECK_THROWS_AS(return_time(ly, A, 0.75, 0), std::invalid_argument);

  for (double x : {0.6, 0.9, 0.51, 0.3}) {
    std::uint64_t steps = 0;
    double y = x;
    do {
      y = y <= 0.5 ? y / (1 - y) : 2 * y - 1;
      ++steps;
    } while (y < 0.5);
    r = return_time(ly, A, x, 100);
    CHECK(r.phi == steps);
    CHECK(r.point == y);
    r = return_time(ly, A, x, steps - 1 == 0 ? 1 : steps - 1);
    CHECK(r.exceeded == (steps > 1));
  }
}

TEST_CASE("renewal_sample_phi examples") {
  const TailKind half = PurePower{0.5};
  CHECK(renewal_sample_phi(half, 0.8) == 1);
  CHECK(renewal_sample_phi(half, 0.5) == 4);
  CHECK(renewal_sample_phi(Harmonic{}, 1.0 - 1e-12) == 1);
  CHECK_THROWS_AS(renewal_sample_phi(half, 0.0), std::domain_error);
  CHECK_THROWS_AS(renewal_sample_phi(half, 1.0), std::domain_error);
  // beyond the horizon only the sentinel horizon + 1 matters
  CHECK(renewal_sample_phi(InverseLog{}, 1e-6, 1000) == 1001);
}

TEST_CASE("renewal_sample_phi is the inverse transform of the tail") {
  for (const TailKind& tail : {TailKind{PurePower{0.3}}, TailKind{PurePower{0.5}}, TailKind{Harmonic{}},
                               TailKind{InverseLog{}}})
    for (int i = 1; i < 400; ++i) {
      const double u = i / 400.0;
      const std::uint64_t phi = renewal_sample_phi(tail, u, 1'000'000);
      if (phi > 1'000'000) {
        CHECK(tail_prob(tail, 1'000'000) >= u);
        continue;
      }
      CHECK(tail_prob(tail, phi) < u);
      CHECK(tail_prob(tail, phi - 1) >= u);
    }
}

TEST_CASE("tails: normalization and basic shape") {
  for (const TailKind& tail : {TailKind{PurePower{0.5}}, TailKind{Harmonic{}}, TailKind{InverseLog{}}}) {
    CHECK(tail_prob(tail, 0) == 1.0);
    double sum_p = 0.0, prev = 1.0, partial = 0.0;
    for (std::uint64_t k = 1; k <= 5000; ++k) {
      sum_p += return_prob(tail, k);
      const double t = tail_prob(tail, k);
      CHECK(t <= prev);
      prev = t;
      partial += t;
      CHECK(std::abs(sum_p + t - 1.0) <= 1e-12);
    }
    CHECK(partial > 1.0);
    CHECK(tail_prob(tail, std::uint64_t{1} << 50) < 0.05);
  }
  CHECK(tail_prob(PurePower{0.5}, 3) == doctest::Approx(0.5));
  CHECK(tail_prob(Harmonic{}, 9) == doctest::Approx(0.1));
  CHECK(tail_prob(InverseLog{}, 0) == doctest::Approx(1.0));
  CHECK(tail_name(parse_tail("power:0.25")) == "power:0.25");
  CHECK_THROWS(parse_tail("power:1.5"));
  CHECK_THROWS(parse_tail("geometric"));
}

TEST_CASE("renewal_u_sequence examples") {
  const auto u = renewal_u_sequence(PurePower{0.5}, 2);
  REQUIRE(u.size() == 3);
  CHECK(u[0] == 1.0);
  const double p1 = 1.0 - std::pow(2.0, -0.5);
  const double p2 = std::pow(2.0, -0.5) - std::pow(3.0, -0.5);
  CHECK(p1 == doctest::Approx(0.29289).epsilon(1e-5));
  CHECK(p2 == doctest::Approx(0.12976).epsilon(1e-4));
  CHECK(u[1] == doctest::Approx(p1).epsilon(1e-15));
  CHECK(u[2] == doctest::Approx(p1 * p1 + p2).epsilon(1e-14));
  CHECK(u[2] == doctest::Approx(0.21555).epsilon(1e-4));
}

TEST_CASE("initial distributions") {
  Rng rng(3);
  const Interval A{0.5, 1.0};
  for (int i = 0; i < 1000; ++i) {
    const double x = sample_initial(UniformOnA{}, A, rng);
    CHECK(A.contains(x));
    const double y = sample_initial(LebesgueOn{{0.1, 0.2}}, A, rng);
    CHECK((y >= 0.1 && y <= 0.2));
  }
  CHECK(sample_initial(PointMass{0.3}, A, rng) == 0.3);
  CHECK(!is_admissible(PointMass{0.3}));
  CHECK(is_admissible(UniformOnA{}));
  CHECK(std::holds_alternative<LebesgueOn>(parse_initial("lebesgue:0,0.5")));
  CHECK_THROWS(parse_initial("lebesgue:0.5,0.5"));
  CHECK_THROWS(parse_initial("point:2"));
}
