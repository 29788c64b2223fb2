#include "erglab/regvar.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace erglab {

TabulatedFunction::TabulatedFunction(std::vector<double> grid,
                                     std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (grid_.empty() || grid_.size() != values_.size())
    throw std::invalid_argument("tabulated function: grid and values must be non-empty and of equal length");
  if (!std::is_sorted(grid_.begin(), grid_.end()) ||
      std::adjacent_find(grid_.begin(), grid_.end()) != grid_.end())
    throw std::invalid_argument("tabulated function: grid must be strictly increasing");
}

TabulatedFunction TabulatedFunction::constant(double value) {
  return TabulatedFunction({1.0}, {value});
}

double TabulatedFunction::operator()(double x) const {
  if (x <= grid_.front()) return values_.front();
  if (x >= grid_.back()) return values_.back();
  const auto it = std::upper_bound(grid_.begin(), grid_.end(), x);
  const auto i = static_cast<std::size_t>(it - grid_.begin());
  const double t = (x - grid_[i - 1]) / (grid_[i] - grid_[i - 1]);
  return values_[i - 1] + t * (values_[i] - values_[i - 1]);
}

namespace {

// int_{a}^{b} (c0 + c1 t)/t dt for 0 < a <= b.
double linear_over_t(double a, double b, double za, double zb) {
  if (b <= a) return 0.0;
  const double c1 = (zb - za) / (b - a);
  const double c0 = za - c1 * a;
  return c0 * std::log(b / a) + c1 * (b - a);
}

}  // namespace

RegVarSpec::RegVarSpec(PowerLog form, double x0) : form_(form), x0_(x0) {
  validate();
}

RegVarSpec::RegVarSpec(KaramataForm form, double x0)
    : form_(std::move(form)), x0_(x0) {
  validate();
  const auto& k = std::get<KaramataForm>(form_);
  const auto grid = k.zeta.grid();
  const auto z = k.zeta.values();
  // Nodes at or below B contribute nothing; the integral starts at B.
  zeta_integral_.assign(grid.size(), 0.0);
  double acc = 0.0;
  double prev_t = k.B;
  double prev_z = k.zeta(k.B);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid[i] > k.B) {
      acc += linear_over_t(prev_t, grid[i], prev_z, z[i]);
      prev_t = grid[i];
      prev_z = z[i];
    }
    zeta_integral_[i] = acc;
  }
}

RegVarSpec RegVarSpec::power_log(double beta, double gamma, double x0) {
  PowerLog f{beta, gamma, 0.0, 1.0};
  if (x0 <= 0.0) x0 = gamma != 0.0 ? 1.5 : 1.0;
  return RegVarSpec(f, x0);
}

void RegVarSpec::validate() const {
  if (!(x0_ > 0.0) || !std::isfinite(x0_))
    throw std::invalid_argument("regvar: x0 must be positive and finite");
  if (const auto* p = std::get_if<PowerLog>(&form_)) {
    if (!(p->scale > 0.0)) throw std::invalid_argument("regvar: scale must be positive");
    if (p->gamma != 0.0 && x0_ <= 1.0)
      throw std::invalid_argument("regvar: a log factor needs x0 > 1");
    if (p->gamma2 != 0.0 && x0_ <= std::numbers::e)
      throw std::invalid_argument("regvar: an iterated log factor needs x0 > e");
    return;
  }
  const auto& k = std::get<KaramataForm>(form_);
  if (!(k.B > 0.0) || x0_ < k.B)
    throw std::invalid_argument("regvar: Karamata form needs 0 < B <= x0");
  if (k.psi.values().empty() || k.zeta.values().empty())
    throw std::invalid_argument("regvar: Karamata form needs tabulated psi and zeta");
  for (double v : k.psi.values())
    if (!(v > 0.0) || !std::isfinite(v))
      throw std::invalid_argument("regvar: psi must be positive and finite");
  for (double v : k.zeta.values())
    if (!(std::abs(v) < 1.0))
      throw std::invalid_argument("regvar: |zeta| must stay below 1");
}

double RegVarSpec::beta() const {
  return std::visit([](const auto& f) { return f.beta; }, form_);
}

double RegVarSpec::zeta_integral(double x) const {
  const auto& k = std::get<KaramataForm>(form_);
  const auto grid = k.zeta.grid();
  const auto z = k.zeta.values();
  if (x <= k.B) return 0.0;
  // Last node strictly below x, but never below B.
  const auto it = std::lower_bound(grid.begin(), grid.end(), x);
  const auto i = static_cast<std::size_t>(it - grid.begin());
  if (i == 0 || grid[i - 1] <= k.B)
    return linear_over_t(k.B, x, k.zeta(k.B), k.zeta(x));
  return zeta_integral_[i - 1] + linear_over_t(grid[i - 1], x, z[i - 1], k.zeta(x));
}

double RegVarSpec::log_eval(double x) const {
  if (!(x >= x0_))
    throw std::domain_error("regvar: argument " + std::to_string(x) +
                            " below domain floor " + std::to_string(x0_));
  if (const auto* p = std::get_if<PowerLog>(&form_)) {
    const double lx = std::log(x);
    double out = std::log(p->scale) + p->beta * lx;
    if (p->gamma != 0.0) out += p->gamma * std::log(lx);
    if (p->gamma2 != 0.0) out += p->gamma2 * std::log(std::log(lx));
    return out;
  }
  const auto& k = std::get<KaramataForm>(form_);
  return k.beta * std::log(x) + std::log(k.psi(x)) + zeta_integral(x);
}

double eval(const RegVarSpec& spec, double x) { return std::exp(spec.log_eval(x)); }

double eval_clamped(const RegVarSpec& spec, double x) {
  return eval(spec, std::max(x, spec.x0()));
}

double asymptotic_inverse(const RegVarSpec& spec, double y) {
  if (std::isnan(y)) throw std::domain_error("asymptotic_inverse: y is NaN");
  // Work with ln F so neither the bracket nor the comparison overflows.
  const double target = y > 0.0 ? std::log(y) : -std::numeric_limits<double>::infinity();
  double lo = spec.x0();
  if (spec.log_eval(lo) > target) return lo;
  double hi = 2.0 * lo;
  constexpr double kLimit = 1e300;
  while (!(spec.log_eval(hi) > target)) {
    lo = hi;
    hi *= 2.0;
    if (hi > kLimit)
      throw std::range_error("asymptotic_inverse: range exhausted, F stays <= " +
                             std::to_string(y));
  }
  while (hi - lo > 1e-12 * hi) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (spec.log_eval(mid) > target)
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

double erickson_scale(const RegVarSpec& L, double n, double x) {
  if (L.beta() != 0.0) throw std::invalid_argument("erickson_scale: L must be slowly varying");
  if (!(x > 0.0 && x < 1.0)) throw std::domain_error("erickson_scale: x must lie in (0,1)");
  return asymptotic_inverse(L, x * eval(L, n));
}

double laplace_sum(const Sequence& b, double s, std::uint64_t max_terms) {
  if (!(s > 0.0)) throw std::domain_error("laplace_sum: s must be positive");
  const double decay = std::exp(-s);
  double weight = 1.0;
  double sum = 0.0;
  double compensation = 0.0;
  for (std::uint64_t k = 0; k < max_terms; ++k) {
    const double term = weight * b(k);
    // Kahan summation: up to 1e8 terms of similar size.
    const double yk = term - compensation;
    const double t = sum + yk;
    compensation = (t - sum) - yk;
    sum = t;
    if (sum > 0.0 && term < 1e-15 * sum) break;
    weight *= decay;
    if (weight == 0.0) break;
  }
  return sum;
}

TauberianTable karamata_tauberian_ratio(const Sequence& b, double rho,
                                        const RegVarSpec& L,
                                        std::span<const std::uint64_t> n_grid,
                                        std::span<const double> s_grid) {
  if (rho < 0.0) throw std::domain_error("karamata_tauberian_ratio: rho must be >= 0");
  TauberianTable out;
  const double gamma_rho = std::tgamma(rho + 1.0);
  std::vector<std::uint64_t> ns(n_grid.begin(), n_grid.end());
  std::sort(ns.begin(), ns.end());
  double partial = 0.0;
  std::uint64_t k = 0;
  for (std::uint64_t n : ns) {
    for (; k < n; ++k) partial += b(k);
    const double nn = static_cast<double>(n);
    const double scale = std::pow(nn, rho) * eval(L, nn) / gamma_rho;
    out.partial_sums.push_back({nn, partial / scale});
  }
  for (double s : s_grid) {
    const double bs = laplace_sum(b, s);
    out.laplace.push_back({s, bs / (std::pow(s, -rho) * eval(L, 1.0 / s))});
  }
  return out;
}

std::vector<RatioPoint> karamata_lemma_ratio(const Sequence& a, double p, double rho,
                                             std::span<const std::uint64_t> n_grid) {
  if (p < -rho - 1.0) throw std::domain_error("karamata_lemma_ratio: need p >= -rho - 1");
  std::vector<std::uint64_t> ns(n_grid.begin(), n_grid.end());
  std::sort(ns.begin(), ns.end());
  std::vector<RatioPoint> out;
  double partial = 0.0;
  std::uint64_t k = 1;
  for (std::uint64_t n : ns) {
    if (n == 0) throw std::domain_error("karamata_lemma_ratio: n must be >= 1");
    for (; k <= n; ++k) partial += std::pow(static_cast<double>(k), p) * a(k);
    if (partial == 0.0)
      throw std::domain_error("karamata_lemma_ratio: partial sum is zero at n = " +
                              std::to_string(n));
    const double nn = static_cast<double>(n);
    out.push_back({nn, std::pow(nn, p + 1.0) * a(n) / partial});
  }
  return out;
}

}  // namespace erglab
