#include "erglab/limits.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

namespace erglab {

namespace {

double log_beta(double a, double b) {
  // tgamma avoids lgamma's write to the global signgam in the common case.
  if (a + b < 170.0) return std::log(std::tgamma(a) * std::tgamma(b) / std::tgamma(a + b));
  return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

// Continued fraction for I_x(a,b) (modified Lentz).
double beta_continued_fraction(double a, double b, double x) {
  constexpr double kTiny = 1e-300;
  constexpr double kEps = 1e-16;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 20000; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) return h;
  }
  throw std::runtime_error("reg_inc_beta: continued fraction did not converge");
}

// I_x(a,b) with y = 1 - x supplied separately so callers can keep precision
// near x = 1.
double ibeta(double a, double b, double x, double y) {
  if (!(a > 0.0) || !(b > 0.0)) throw std::domain_error("reg_inc_beta: a and b must be positive");
  if (!(x >= 0.0 && x <= 1.0)) throw std::domain_error("reg_inc_beta: x outside [0,1]");
  if (x == 0.0) return 0.0;
  if (y == 0.0) return 1.0;
  const double front = std::exp(a * std::log(x) + b * std::log(y) - log_beta(a, b));
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(a, b, x) / a;
  return 1.0 - front * beta_continued_fraction(b, a, y) / b;
}

void check_alpha(double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::domain_error("law: alpha outside [0,1]");
}

// v = x^{1/(1-alpha)} together with 1 - v computed without cancellation.
std::pair<double, double> kac_argument(double alpha, double x) {
  if (x <= 0.0) return {0.0, 1.0};
  if (x >= 1.0) return {1.0, 0.0};
  const double lv = std::log(x) / (1.0 - alpha);
  return {std::exp(lv), -std::expm1(lv)};
}

}  // namespace

double reg_inc_beta(double a, double b, double x) { return ibeta(a, b, x, 1.0 - x); }

AlphaLaw canonical(const AlphaLaw& law) {
  return std::visit(
      [](const auto& l) -> AlphaLaw {
        using L = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<L, Xi>) {
          check_alpha(l.alpha);
          if (l.alpha == 0.0) return Dirac{0.0};
          if (l.alpha == 1.0) return Dirac{1.0};
          return l;
        } else if constexpr (std::is_same_v<L, KacX>) {
          check_alpha(l.alpha);
          if (l.alpha == 0.0) return Dirac{0.0};
          if (l.alpha == 1.0) return Dirac{1.0};
          return l;
        } else if constexpr (std::is_same_v<L, KacY>) {
          check_alpha(l.alpha);
          if (l.alpha == 0.0) return Dirac{1.0};
          if (l.alpha == 1.0)
            throw std::domain_error("law: KacY needs alpha < 1 (the alpha -> 1 limit is uniform)");
          return l;
        } else if constexpr (std::is_same_v<L, Dirac>) {
          if (!(l.c >= 0.0 && l.c <= 1.0)) throw std::domain_error("law: Dirac point outside [0,1]");
          return l;
        } else {
          return l;
        }
      },
      law);
}

AlphaLaw parse_law(const std::string& text) {
  if (text == "uniform") return Uniform01{};
  const auto colon = text.find(':');
  if (colon == std::string::npos)
    throw std::invalid_argument("law: expected xi:A, kacx:A, kacy:A, uniform or dirac:C, got '" + text + "'");
  const std::string kind = text.substr(0, colon);
  const std::string value = text.substr(colon + 1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc{} || ptr != value.data() + value.size())
    throw std::invalid_argument("law: bad parameter '" + value + "'");
  if (kind == "xi") return canonical(Xi{v});
  if (kind == "kacx") return canonical(KacX{v});
  if (kind == "kacy") return canonical(KacY{v});
  if (kind == "dirac") return canonical(Dirac{v});
  throw std::invalid_argument("law: unknown kind '" + kind + "'");
}

std::string law_name(const AlphaLaw& law) {
  auto num = [](double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
  };
  return std::visit(
      [&](const auto& l) -> std::string {
        using L = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<L, Xi>) return "xi:" + num(l.alpha);
        else if constexpr (std::is_same_v<L, KacX>) return "kacx:" + num(l.alpha);
        else if constexpr (std::is_same_v<L, KacY>) return "kacy:" + num(l.alpha);
        else if constexpr (std::is_same_v<L, Dirac>) return "dirac:" + num(l.c);
        else return "uniform";
      },
      law);
}

double pdf(const AlphaLaw& law_in, double x) {
  const AlphaLaw law = canonical(law_in);
  if (!(x >= 0.0 && x <= 1.0)) return 0.0;
  return std::visit(
      [x](const auto& l) -> double {
        using L = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<L, Dirac>) {
          throw std::domain_error("pdf: a point mass has no density");
        } else if constexpr (std::is_same_v<L, Uniform01>) {
          return 1.0;
        } else {
          const double a = l.alpha;
          const double c = std::sin(std::numbers::pi * a) / std::numbers::pi;
          if constexpr (std::is_same_v<L, Xi>) {
            return c / (std::pow(x, 1.0 - a) * std::pow(1.0 - x, a));
          } else {
            const auto [v, one_minus_v] = kac_argument(a, x);
            (void)v;
            if constexpr (std::is_same_v<L, KacX>)
              return c / (1.0 - a) /
                     (std::pow(x, (1.0 - 2.0 * a) / (1.0 - a)) * std::pow(one_minus_v, a));
            else
              return c / (1.0 - a) / std::pow(one_minus_v, 1.0 - a);
          }
        }
      },
      law);
}

double cdf(const AlphaLaw& law_in, double x) {
  const AlphaLaw law = canonical(law_in);
  return std::visit(
      [x](const auto& l) -> double {
        using L = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<L, Dirac>) {
          return x >= l.c ? 1.0 : 0.0;
        } else {
          if (x <= 0.0) return 0.0;
          if (x >= 1.0) return 1.0;
          if constexpr (std::is_same_v<L, Uniform01>) {
            return x;
          } else if constexpr (std::is_same_v<L, Xi>) {
            return ibeta(l.alpha, 1.0 - l.alpha, x, 1.0 - x);
          } else {
            const auto [v, one_minus_v] = kac_argument(l.alpha, x);
            if constexpr (std::is_same_v<L, KacX>)
              return ibeta(l.alpha, 1.0 - l.alpha, v, one_minus_v);
            else
              return ibeta(1.0 - l.alpha, l.alpha, v, one_minus_v);
          }
        }
      },
      law);
}

double quantile(const AlphaLaw& law_in, double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::domain_error("quantile: p outside [0,1]");
  const AlphaLaw law = canonical(law_in);
  if (const auto* d = std::get_if<Dirac>(&law)) return d->c;
  if (std::holds_alternative<Uniform01>(law)) return p;
  double lo = 0.0;
  double hi = 1.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (cdf(law, mid) < p)
      lo = mid;
    else
      hi = mid;
  }
  return hi;
}

double sample(const AlphaLaw& law_in, Rng& rng) {
  const AlphaLaw law = canonical(law_in);
  return std::visit(
      [&rng](const auto& l) -> double {
        using L = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<L, Dirac>) {
          throw std::domain_error("sample: point masses are not sampled");
        } else if constexpr (std::is_same_v<L, Uniform01>) {
          return rng.uniform();
        } else {
          const double a = l.alpha;
          std::gamma_distribution<double> ga(a, 1.0);
          std::gamma_distribution<double> gb(1.0 - a, 1.0);
          double g1 = 0.0;
          double g2 = 0.0;
          do {
            g1 = ga(rng);
            g2 = gb(rng);
          } while (!(g1 + g2 > 0.0));
          const double xi = g1 / (g1 + g2);
          const double one_minus_xi = g2 / (g1 + g2);
          if constexpr (std::is_same_v<L, Xi>) return xi;
          else if constexpr (std::is_same_v<L, KacX>) return std::pow(xi, 1.0 - a);
          else return std::pow(one_minus_xi, 1.0 - a);
        }
      },
      law);
}

}  // namespace erglab
