#include "erglab/processes.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace erglab {

TailTable::TailTable(std::vector<double> values, TailSource source, double a_mass)
    : values_(std::move(values)), source_(std::move(source)), a_mass_(a_mass) {
  if (values_.empty() || values_.front() != 1.0)
    throw std::invalid_argument("TailTable: t_0 must equal 1");
  if (!(a_mass_ > 0.0) || !std::isfinite(a_mass_))
    throw std::invalid_argument("TailTable: a_mass must be positive");
  for (std::size_t k = 1; k < values_.size(); ++k) {
    if (!(values_[k] >= 0.0 && values_[k] <= values_[k - 1]))
      throw std::invalid_argument("TailTable: values must be nonincreasing in [0,1] (index " +
                                  std::to_string(k) + ")");
  }
  wandering_.resize(values_.size());
  double acc = 0.0;
  for (std::size_t k = 0; k < values_.size(); ++k) {
    acc += values_[k];
    wandering_[k] = a_mass_ * acc;
  }
}

double TailTable::wandering(std::uint64_t n) const {
  if (n >= wandering_.size())
    throw std::out_of_range("TailTable: index " + std::to_string(n) + " beyond K = " +
                            std::to_string(max_index()));
  return wandering_[n];
}

TailTable exact_tail_table(const TailKind& tail, std::uint64_t K) {
  std::vector<double> t(K + 1);
  for (std::uint64_t k = 0; k <= K; ++k) t[k] = tail_prob(tail, k);
  return TailTable(std::move(t), ExactTail{tail}, 1.0);
}

double wandering_rate(const TailTable& table, std::uint64_t n) { return table.wandering(n); }

// ---------------------------------------------------------------------------

RenewalSimulator::RenewalSimulator(RenewalShift model) : model_(std::move(model)) {
  if (const auto* d = std::get_if<DelayTail>(&model_.delay)) {
    delay_cumulative_.resize(d->cap + 1);
    double acc = 0.0;
    for (std::uint64_t k = 0; k <= d->cap; ++k) {
      acc += tail_prob(model_.tail, k);
      delay_cumulative_[k] = acc;
    }
  }
}

std::uint64_t RenewalSimulator::draw_delay(Rng& rng) const {
  if (delay_cumulative_.empty()) return 0;
  const double target = rng.uniform() * delay_cumulative_.back();
  const auto it = std::upper_bound(delay_cumulative_.begin(), delay_cumulative_.end(), target);
  return std::min<std::uint64_t>(static_cast<std::uint64_t>(it - delay_cumulative_.begin()),
                                 delay_cumulative_.size() - 1);
}

PathSample RenewalSimulator::operator()(std::uint64_t n, Rng& rng) const {
  const std::uint64_t first = draw_delay(rng);
  const TailKind& tail = model_.tail;
  return renewal_path(n, first, [&](std::uint64_t remaining) {
    return renewal_sample_phi(tail, rng.uniform(), remaining);
  });
}

PathSample simulate_renewal_zn(const RenewalShift& model, std::uint64_t n, Rng& rng) {
  return RenewalSimulator(model)(n, rng);
}

namespace {

template <class Map>
PathSample orbit_zn(const Map& m, Interval A, double x, std::uint64_t n) {
  PathSample s;
  s.n = n;
  s.started_in_a = A.contains(x);
  s.phi_first = n + 1;
  bool hit = s.started_in_a;
  std::uint64_t z = 0;
  double y = x;
  for (std::uint64_t k = 1; k <= n; ++k) {
    const double next = m(y);
    if (next == y) {
      // A floating-point fixed point: the rest of the orbit is constant.
      if (A.contains(y)) {
        z = n;
        hit = true;
        if (s.phi_first > n) s.phi_first = k;
      }
      break;
    }
    y = next;
    if (A.contains(y)) {
      z = k;
      hit = true;
      if (s.phi_first > n) s.phi_first = k;
    }
  }
  s.entered = hit;
  s.z = z;
  return s;
}

}  // namespace

PathSample zn_from_point(const IntervalMap& map, Interval A, double x, std::uint64_t n) {
  if (!(x >= 0.0 && x <= 1.0)) throw std::domain_error("zn_from_point: x outside [0,1]");
  return std::visit([&](const auto& m) { return orbit_zn(m, A, x, n); }, map);
}

PathSample simulate_map_zn(const IntervalMap& map, Interval A, const InitialDistribution& init,
                           std::uint64_t n, Rng& rng) {
  if (n == 0) throw std::invalid_argument("simulate_map_zn: n must be >= 1");
  return zn_from_point(map, A, sample_initial(init, A, rng), n);
}

KacPair kac_pair(const PathSample& sample, const TailTable& table) {
  const double wn = table.wandering(sample.n);
  return {table.wandering(sample.z) / wn, table.wandering(sample.n - sample.z) / wn};
}

// ---------------------------------------------------------------------------

TailTable estimate_tail(const IntervalMap& map, Interval A, std::uint64_t sample_size,
                        std::uint64_t K, Rng& rng, const TailEstimateOptions& options) {
  if (sample_size < 10'000) throw std::invalid_argument("estimate_tail: sample_size must be >= 10^4");
  if (!(A.lo > 0.0) || !(A.hi > A.lo) || A.hi > 1.0)
    throw std::invalid_argument("estimate_tail: A must be a nondegenerate subinterval of (0,1]");
  const std::uint64_t cap = options.cap == 0 ? std::max<std::uint64_t>(K, 1'000'000) : options.cap;
  if (cap < K) throw std::invalid_argument("estimate_tail: cap must be >= K");

  double x = rng.uniform(A.lo, A.hi);
  for (std::uint64_t b = 0; b < options.burn_in; ++b) {
    const auto r = return_time(map, A, x, cap);
    x = r.exceeded ? rng.uniform(A.lo, A.hi) : r.point;
  }

  // hist[k] = number of returns with phi == k, k <= K; hist[K+1] = phi > K.
  std::vector<std::uint64_t> hist(K + 2, 0);
  std::uint64_t censored = 0;
  // Visits to the top tenth of A, in kTopWindows windows of equal width.
  constexpr int kTopWindows = 4;
  const double window = 0.025 * A.length();
  std::array<std::uint64_t, kTopWindows> top{};
  for (std::uint64_t i = 0; i < sample_size; ++i) {
    const double depth = (A.hi - x) / window;
    if (depth < kTopWindows) ++top[std::min(static_cast<int>(depth), kTopWindows - 1)];
    const auto r = return_time(map, A, x, cap);
    if (r.exceeded) {
      ++censored;
      ++hist[K + 1];
      x = rng.uniform(A.lo, A.hi);
    } else {
      ++hist[std::min<std::uint64_t>(r.phi, K + 1)];
      x = r.point;
    }
  }
  const double rate = static_cast<double>(censored) / static_cast<double>(sample_size);
  if (rate > options.max_censoring)
    throw CensoringError("estimate_tail: censoring rate " + std::to_string(rate) +
                         " exceeds " + std::to_string(options.max_censoring));

  std::vector<double> t(K + 1);
  std::uint64_t at_most = 0;  // returns with phi <= k
  const double total = static_cast<double>(sample_size);
  for (std::uint64_t k = 0; k <= K; ++k) {
    at_most += hist[k];
    t[k] = static_cast<double>(sample_size - at_most) / total;
  }

  double a_mass = 0.0;
  if (options.a_mass) {
    a_mass = *options.a_mass;
  } else {
    // Least-squares line through the window densities, evaluated at hi.
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (int j = 0; j < kTopWindows; ++j) {
      const double c = -(j + 0.5);
      const double m = static_cast<double>(top[j]) / (total * window);
      sx += c;
      sy += m;
      sxx += c * c;
      sxy += c * m;
    }
    const double slope = (kTopWindows * sxy - sx * sy) / (kTopWindows * sxx - sx * sx);
    const double g_top = (sy - slope * sx) / kTopWindows;
    if (!(g_top > 0.0))
      throw std::runtime_error("estimate_tail: no density estimate at the top of A; pass a_mass");
    a_mass = 1.0 / g_top;
  }
  return TailTable(std::move(t), EmpiricalTail{sample_size, censored}, a_mass);
}

TailTable sample_renewal_tail(const TailKind& tail, std::uint64_t sample_size, std::uint64_t K,
                              Rng& rng) {
  if (sample_size == 0) throw std::invalid_argument("sample_renewal_tail: sample_size must be >= 1");
  std::vector<std::uint64_t> hist(K + 2, 0);
  for (std::uint64_t i = 0; i < sample_size; ++i)
    ++hist[std::min<std::uint64_t>(renewal_sample_phi(tail, rng.uniform(), K), K + 1)];
  std::vector<double> t(K + 1);
  std::uint64_t at_most = 0;
  for (std::uint64_t k = 0; k <= K; ++k) {
    at_most += hist[k];
    t[k] = static_cast<double>(sample_size - at_most) / static_cast<double>(sample_size);
  }
  return TailTable(std::move(t), EmpiricalTail{sample_size, 0}, 1.0);
}

// ---------------------------------------------------------------------------

std::vector<double> exact_zn_pmf(std::span<const double> u, std::span<const double> tail,
                                 std::uint64_t n) {
  if (u.size() < n + 1 || tail.size() < n + 1)
    throw std::out_of_range("exact_zn_pmf: sequences shorter than n + 1");
  std::vector<double> pmf(n + 1);
  for (std::uint64_t k = 0; k <= n; ++k) pmf[k] = u[k] * tail[n - k];
  return pmf;
}

std::vector<double> exact_zn_pmf(const TailKind& tail, std::uint64_t n) {
  if (n > kMaxExactHorizon)
    throw std::length_error("exact_zn_pmf: n beyond the O(n^2) guard of " +
                            std::to_string(kMaxExactHorizon));
  const auto u = renewal_u_sequence(tail, n);
  std::vector<double> t(n + 1);
  for (std::uint64_t k = 0; k <= n; ++k) t[k] = tail_prob(tail, k);
  return exact_zn_pmf(u, t, n);
}

ShiftReport shift_identity_check(const IntervalMap& map, Interval A, double x, std::uint64_t n,
                                 const TailTable& table, const RegVarSpec& F) {
  if (!(x >= 0.0 && x <= 1.0)) throw std::domain_error("shift_identity_check: x outside [0,1]");
  if (n > table.max_index())
    throw std::out_of_range("shift_identity_check: tail table does not cover n");
  ShiftReport rep;
  std::vector<double> orbit(n + 2);
  orbit[0] = x;
  for (std::uint64_t k = 1; k <= n + 1; ++k) orbit[k] = map_eval(map, orbit[k - 1]);

  bool returns_by_n = false;
  rep.z = 0;
  for (std::uint64_t k = 0; k <= n; ++k) {
    if (A.contains(orbit[k])) {
      rep.z = k;
      if (k >= 1) returns_by_n = true;
    }
  }
  rep.z_shift = zn_from_point(map, A, orbit[1], n).z;

  std::uint64_t expected = 0;
  if (A.contains(orbit[n + 1])) {
    rep.which = ShiftCase::kHitsAtNPlusOne;
    expected = n;
  } else if (returns_by_n) {
    rep.which = ShiftCase::kEntersAndLeaves;
    expected = rep.z - 1;
  } else {
    rep.which = ShiftCase::kMisses;
    expected = 0;
  }
  rep.identity_holds = rep.z_shift == expected;

  const double wn = table.wandering(n);
  rep.psi_delta =
      std::abs(table.wandering(n - rep.z_shift) - table.wandering(n - rep.z)) / wn;
  const double fn = eval_clamped(F, static_cast<double>(n));
  rep.distortion_delta = std::abs(eval_clamped(F, static_cast<double>(rep.z_shift)) -
                                  eval_clamped(F, static_cast<double>(rep.z))) /
                         fn;
  return rep;
}

// ---------------------------------------------------------------------------

std::uint64_t laplace_truncation(double s) {
  if (!(s > 0.0)) throw std::domain_error("laplace_truncation: s must be positive");
  return static_cast<std::uint64_t>(std::floor(std::log(1e12) / s)) + 1;
}

LaplaceProduct laplace_product(const TailKind& tail, double s, std::uint64_t n_truncate) {
  if (!(s > 0.0)) throw std::domain_error("laplace_product: s must be positive");
  if (!(std::exp(-static_cast<double>(n_truncate) * s) < 1e-12))
    throw std::invalid_argument("laplace_product: n_truncate too small for e^{-ns} < 1e-12");
  constexpr std::uint64_t kGuard = 200'000;
  if (n_truncate > kGuard)
    throw std::length_error("laplace_product: n_truncate beyond the O(n^2) guard");
  const auto u = renewal_u_sequence(tail, n_truncate);
  LaplaceProduct out;
  const double decay = std::exp(-s);
  double w = 1.0;
  for (std::uint64_t k = 0; k <= n_truncate; ++k) {
    out.q += tail_prob(tail, k) * w;
    out.u += u[k] * w;
    w *= decay;
  }
  out.product = s * out.u * out.q;
  return out;
}

}  // namespace erglab
