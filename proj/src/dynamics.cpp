#include "erglab/dynamics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace erglab {

double thaler_branch_point() {
  // f(0.5) < 1 < f(1); bisect until the bracket collapses to adjacent doubles.
  double lo = 0.5;
  double hi = 1.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (ThalerMap::left(mid) < 1.0)
      lo = mid;
    else
      hi = mid;
  }
  return std::abs(ThalerMap::left(lo) - 1.0) < std::abs(ThalerMap::left(hi) - 1.0) ? lo : hi;
}

ThalerMap::ThalerMap() : a_(thaler_branch_point()) {}

double ThalerMap::branch_inverse(int branch, double y) const {
  if (branch != 0) return a_ + y * (1.0 - a_);
  if (y <= 0.0) return 0.0;
  if (y >= 1.0) return a_;
  // left(x) lies between x and x + x^2, so the preimage is bracketed by the
  // roots of x = y and x + x^2 = y.
  double lo = 0.5 * (std::sqrt(1.0 + 4.0 * y) - 1.0);
  double hi = std::min(y, a_);
  if (lo > hi) lo = 0.0;
  for (int it = 0; it < 400; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (left(mid) < y)
      lo = mid;
    else
      hi = mid;
  }
  return left(lo) >= y ? lo : hi;
}

double map_eval(const IntervalMap& map, double x) {
  if (!(x >= 0.0 && x <= 1.0)) throw std::domain_error("map_eval: x outside [0,1]");
  return std::visit([x](const auto& m) { return m(x); }, map);
}

std::string map_name(const IntervalMap& map) {
  return std::visit([](const auto& m) { return std::string(m.name()); }, map);
}

ReturnResult return_time(const IntervalMap& map, Interval A, double x,
                         std::uint64_t cap) {
  if (cap == 0) throw std::invalid_argument("return_time: cap must be >= 1");
  if (!(A.hi > A.lo)) throw std::invalid_argument("return_time: A must have positive length");
  if (!(x >= 0.0 && x <= 1.0)) throw std::domain_error("return_time: x outside [0,1]");
  return std::visit(
      [&](const auto& m) {
        ReturnResult r;
        double y = x;
        for (std::uint64_t n = 1; n <= cap; ++n) {
          y = m(y);
          if (A.contains(y)) {
            r.phi = n;
            r.point = y;
            return r;
          }
        }
        r.phi = cap;
        r.exceeded = true;
        r.point = y;
        return r;
      },
      map);
}

// ---------------------------------------------------------------------------

TailKind parse_tail(const std::string& text) {
  if (text == "harmonic") return Harmonic{};
  if (text == "invlog") return InverseLog{};
  if (text.rfind("power:", 0) == 0) {
    const std::string value = text.substr(6);
    double alpha = 0.0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), alpha);
    if (ec != std::errc{} || ptr != value.data() + value.size() || !(alpha > 0.0 && alpha < 1.0))
      throw std::invalid_argument("tail: power exponent must lie in (0,1), got '" + value + "'");
    return PurePower{alpha};
  }
  throw std::invalid_argument("tail: expected power:ALPHA, harmonic or invlog, got '" + text + "'");
}

std::string tail_name(const TailKind& tail) {
  if (const auto* p = std::get_if<PurePower>(&tail)) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, p->alpha);
    return "power:" + std::string(buf, res.ptr);
  }
  return std::holds_alternative<Harmonic>(tail) ? "harmonic" : "invlog";
}

double tail_prob(const TailKind& tail, std::uint64_t n) {
  const double x = static_cast<double>(n);
  if (const auto* p = std::get_if<PurePower>(&tail)) return std::pow(x + 1.0, -p->alpha);
  if (std::holds_alternative<Harmonic>(tail)) return 1.0 / (x + 1.0);
  return 1.0 / std::log(x + std::numbers::e);
}

double return_prob(const TailKind& tail, std::uint64_t k) {
  if (k == 0) return 0.0;
  const double x = static_cast<double>(k);
  if (const auto* p = std::get_if<PurePower>(&tail))
    return -std::pow(x, -p->alpha) * std::expm1(-p->alpha * std::log1p(1.0 / x));
  if (std::holds_alternative<Harmonic>(tail)) return 1.0 / (x * (x + 1.0));
  const double lo = std::log(x - 1.0 + std::numbers::e);
  const double hi = std::log(x + std::numbers::e);
  return std::log1p(1.0 / (x - 1.0 + std::numbers::e)) / (lo * hi);
}

std::uint64_t renewal_sample_phi(const TailKind& tail, double u, std::uint64_t horizon) {
  if (!(u > 0.0 && u < 1.0)) throw std::domain_error("renewal_sample_phi: u must lie in (0,1)");
  // phi = min{n >= 1 : n > threshold}
  double threshold;
  if (const auto* p = std::get_if<PurePower>(&tail))
    threshold = std::expm1(-std::log(u) / p->alpha);
  else if (std::holds_alternative<Harmonic>(tail))
    threshold = 1.0 / u - 1.0;
  else
    threshold = std::exp(1.0 / u) - std::numbers::e;
  if (!(threshold < static_cast<double>(horizon))) return horizon + 1;
  std::uint64_t phi = threshold < 1.0 ? 1 : static_cast<std::uint64_t>(threshold) + 1;
  // Rounding in the closed form can be off by one near integer thresholds.
  while (phi > 1 && tail_prob(tail, phi - 1) < u) --phi;
  while (!(tail_prob(tail, phi) < u)) {
    if (++phi > horizon) return horizon + 1;
  }
  return phi;
}

namespace {

std::vector<double> convolve_renewal(const std::vector<double>& p, std::uint64_t n_max) {
  std::vector<double> u(n_max + 1, 0.0);
  u[0] = 1.0;
  for (std::uint64_t m = 1; m <= n_max; ++m) {
    double acc0 = 0.0, acc1 = 0.0;
    const double* pk = p.data() + 1;
    const double* ub = u.data() + (m - 1);
    std::uint64_t k = 0;
    for (; k + 1 < m; k += 2) {
      acc0 += pk[k] * ub[-static_cast<std::ptrdiff_t>(k)];
      acc1 += pk[k + 1] * ub[-static_cast<std::ptrdiff_t>(k + 1)];
    }
    if (k < m) acc0 += pk[k] * ub[-static_cast<std::ptrdiff_t>(k)];
    u[m] = acc0 + acc1;
  }
  return u;
}

}  // namespace

std::vector<double> renewal_u_sequence(const TailKind& tail, std::uint64_t n_max) {
  std::vector<double> p(n_max + 1, 0.0);
  for (std::uint64_t k = 1; k <= n_max; ++k) p[k] = return_prob(tail, k);
  return convolve_renewal(p, n_max);
}

std::vector<double> renewal_u_sequence(const std::vector<double>& tail_values,
                                       std::uint64_t n_max) {
  if (tail_values.size() < n_max + 1)
    throw std::out_of_range("renewal_u_sequence: tail table shorter than n_max + 1");
  std::vector<double> p(n_max + 1, 0.0);
  for (std::uint64_t k = 1; k <= n_max; ++k) p[k] = tail_values[k - 1] - tail_values[k];
  return convolve_renewal(p, n_max);
}

// ---------------------------------------------------------------------------

bool is_admissible(const InitialDistribution& init) {
  if (const auto* l = std::get_if<LebesgueOn>(&init)) return l->support.length() > 0.0;
  return std::holds_alternative<UniformOnA>(init);
}

double sample_initial(const InitialDistribution& init, Interval A, Rng& rng) {
  if (const auto* l = std::get_if<LebesgueOn>(&init))
    return rng.uniform(l->support.lo, l->support.hi);
  if (std::holds_alternative<UniformOnA>(init)) return rng.uniform(A.lo, A.hi);
  return std::get<PointMass>(init).x;
}

namespace {

double parse_number(const std::string& s) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size())
    throw std::invalid_argument("expected a number, got '" + s + "'");
  return v;
}

}  // namespace

InitialDistribution parse_initial(const std::string& text) {
  if (text == "uniform_on_a") return UniformOnA{};
  if (text.rfind("point:", 0) == 0) {
    const double x = parse_number(text.substr(6));
    if (!(x >= 0.0 && x <= 1.0)) throw std::invalid_argument("init: point outside [0,1]");
    return PointMass{x};
  }
  if (text.rfind("lebesgue:", 0) == 0) {
    const std::string body = text.substr(9);
    const auto comma = body.find(',');
    if (comma == std::string::npos)
      throw std::invalid_argument("init: expected lebesgue:LO,HI");
    const Interval support{parse_number(body.substr(0, comma)), parse_number(body.substr(comma + 1))};
    if (!(support.lo >= 0.0 && support.hi <= 1.0 && support.hi > support.lo))
      throw std::invalid_argument("init: lebesgue support must be a nondegenerate subinterval of [0,1]");
    return LebesgueOn{support};
  }
  throw std::invalid_argument("init: expected uniform_on_a, lebesgue:LO,HI or point:X, got '" + text + "'");
}

}  // namespace erglab
