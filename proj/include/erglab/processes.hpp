#pragma once

// The last-visit process Z_n, the normalized Kac processes, wandering rates,
// the exact renewal law of Z_n and the pathwise shift identities.

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <variant>
#include <vector>

#include "erglab/dynamics.hpp"
#include "erglab/regvar.hpp"
#include "erglab/rng.hpp"

namespace erglab {

struct ExactTail {
  TailKind kind;
};
struct EmpiricalTail {
  std::uint64_t sample_count = 0;
  std::uint64_t censored = 0;
  double censoring_rate() const {
    return sample_count == 0 ? 0.0 : static_cast<double>(censored) / static_cast<double>(sample_count);
  }
};
using TailSource = std::variant<ExactTail, EmpiricalTail>;

/// t_k ~ mu_A(phi > k) for k = 0..K together with the wandering rate
/// W_n = a_mass * sum_{k<=n} t_k.
class TailTable {
 public:
  /// Validates t_0 = 1, nonincreasing, values in [0, 1], a_mass > 0.
  TailTable(std::vector<double> values, TailSource source, double a_mass = 1.0);

  std::span<const double> values() const { return values_; }
  std::uint64_t max_index() const { return values_.size() - 1; }
  const TailSource& source() const { return source_; }
  double a_mass() const { return a_mass_; }

  /// W_n. Throws std::out_of_range when n > K.
  double wandering(std::uint64_t n) const;

 private:
  std::vector<double> values_;
  std::vector<double> wandering_;
  TailSource source_;
  double a_mass_;
};

/// t_k = P(phi > k), k = 0..K, with a_mass = 1.
TailTable exact_tail_table(const TailKind& tail, std::uint64_t K);

/// W_n = a_mass * sum_{k=0}^{n} t_k.
double wandering_rate(const TailTable& table, std::uint64_t n);

struct PathSample {
  std::uint64_t n = 0;
  std::uint64_t z = 0;           // Z_n, 0 when the path misses A up to n
  bool started_in_a = false;
  bool entered = false;          // the path visits A at some time in [0, n]
  std::uint64_t phi_first = 0;   // first visit time >= 1 (n + 1 when beyond n)
};

/// Z_n along a renewal path whose renewals sit at `first`, first + phi_1, ...
/// with the phi drawn by next_phi(remaining_horizon). Cost is the number of
/// renewals up to n.
template <class NextPhi>
PathSample renewal_path(std::uint64_t n, std::uint64_t first, NextPhi&& next_phi) {
  PathSample s;
  s.n = n;
  s.started_in_a = first == 0;
  if (first > n) {
    s.phi_first = n + 1;
    return s;
  }
  s.entered = true;
  std::uint64_t t = first;
  s.phi_first = 0;
  for (;;) {
    const std::uint64_t step = next_phi(n - t);
    if (step > n - t) break;
    t += step;
    if (s.phi_first == 0) s.phi_first = t;
  }
  if (s.phi_first == 0) s.phi_first = n + 1;
  s.z = t;
  return s;
}

/// Z_n for the renewal shift. AtRenewal starts in A at time 0; DelayTail
/// draws the first renewal from P(D = d) proportional to P(phi > d), d <= cap.
/// The delay table is built once per simulator.
class RenewalSimulator {
 public:
  explicit RenewalSimulator(RenewalShift model);

  const RenewalShift& model() const { return model_; }
  std::uint64_t draw_delay(Rng& rng) const;
  PathSample operator()(std::uint64_t n, Rng& rng) const;

 private:
  RenewalShift model_;
  std::vector<double> delay_cumulative_;
};

PathSample simulate_renewal_zn(const RenewalShift& model, std::uint64_t n, Rng& rng);

/// Z_n along the orbit of x (time 0 included).
PathSample zn_from_point(const IntervalMap& map, Interval A, double x, std::uint64_t n);

/// Z_n for an interval map with a random start drawn from init.
PathSample simulate_map_zn(const IntervalMap& map, Interval A, const InitialDistribution& init,
                           std::uint64_t n, Rng& rng);

struct KacPair {
  double phi = 0.0;  // W_{Z_n} / W_n
  double psi = 0.0;  // W_{n - Z_n} / W_n
};

KacPair kac_pair(const PathSample& sample, const TailTable& table);

struct TailEstimateOptions {
  std::uint64_t cap = 0;            // iteration cap per return; 0 means max(K, 10^6)
  std::uint64_t burn_in = 1'000;    // induced-map returns discarded first
  double max_censoring = 0.01;
  std::optional<double> a_mass;     // overrides the density-scale estimate
};

/// Empirical tail from a long trajectory of the induced (first-return) map
/// on A. A return that exceeds the cap counts as phi > K and restarts the
/// trajectory uniformly on A. Throws CensoringError above max_censoring.
///
/// Unless given, a_mass = mu(A) is estimated under the convention that the
/// invariant density equals 1 at the upper end of A: the induced trajectory
/// samples mu restricted to A and normalized, so mu(A) = 1 / g(hi), with the
/// normalized density g(hi) extrapolated by a least-squares line through the
/// visit densities of four windows covering the top tenth of A.
TailTable estimate_tail(const IntervalMap& map, Interval A, std::uint64_t sample_size,
                        std::uint64_t K, Rng& rng, const TailEstimateOptions& options = {});

/// Empirical tail of i.i.d. renewal return times: t_k = #(phi > k) / sample_size.
TailTable sample_renewal_tail(const TailKind& tail, std::uint64_t sample_size, std::uint64_t K,
                              Rng& rng);

class CensoringError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// P(Z_n = k) = u_k P(phi > n - k) for a start at a renewal. Guarded at n <= 10^5.
std::vector<double> exact_zn_pmf(const TailKind& tail, std::uint64_t n);

/// Same law from a precomputed renewal sequence u_0..u_n and tail t_0..t_n.
std::vector<double> exact_zn_pmf(std::span<const double> u, std::span<const double> tail,
                                 std::uint64_t n);

constexpr std::uint64_t kMaxExactHorizon = 100'000;

enum class ShiftCase {
  kEntersAndLeaves,  // phi <= n and T^{n+1} x not in A: Z_n(Tx) = Z_n(x) - 1
  kHitsAtNPlusOne,   // T^{n+1} x in A: Z_n(Tx) = n
  kMisses,           // neither: both orbits miss A in the window, Z_n(Tx) = 0
};

struct ShiftReport {
  ShiftCase which = ShiftCase::kMisses;
  std::uint64_t z = 0;        // Z_n(x)
  std::uint64_t z_shift = 0;  // Z_n(Tx), from an independent orbit of Tx
  bool identity_holds = false;
  double psi_delta = 0.0;     // |Psi_n(Tx) - Psi_n(x)|
  double distortion_delta = 0.0;  // |F(Z_n(Tx)) - F(Z_n(x))| / F(n)
};

/// Checks the case split for Z_n o T pathwise and reports the Psi_n and
/// distorted increments. `table` must cover n; F is evaluated clamped at x0.
ShiftReport shift_identity_check(const IntervalMap& map, Interval A, double x, std::uint64_t n,
                                 const TailTable& table, const RegVarSpec& F);

struct LaplaceProduct {
  double q = 0.0;        // sum_n P(phi > n) e^{-ns}
  double u = 0.0;        // sum_n u_n e^{-ns}
  double product = 0.0;  // s U(s) Q(s)
};

/// Smallest n with e^{-ns} < 1e-12.
std::uint64_t laplace_truncation(double s);

/// s U(s) Q(s) with both transforms truncated at n_truncate, which must
/// satisfy e^{-n s} < 1e-12 and stay within the O(n^2) guard (2 * 10^5).
LaplaceProduct laplace_product(const TailKind& tail, double s, std::uint64_t n_truncate);

}  // namespace erglab
