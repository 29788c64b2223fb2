#pragma once

// Interval maps with an indifferent fixed point at 0, the renewal-shift
// model, orbit iteration and first-return times.

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <variant>
#include <vector>

#include "erglab/rng.hpp"

namespace erglab {

/// Closed interval [lo, hi] inside [0, 1].
struct Interval {
  double lo = 0.0;
  double hi = 1.0;

  bool contains(double x) const { return x >= lo && x <= hi; }
  double length() const { return hi - lo; }
};

/// One monotone increasing full branch. The domain is [lo, hi] when
/// lo_closed, otherwise (lo, hi].
struct BranchDomain {
  double lo;
  double hi;
  bool lo_closed;
};

/// f(x) = x + x^2 e^{-1/x} on [0, a], (x - a)/(1 - a) on (a, 1], f(a) = 1.
class ThalerMap {
 public:
  ThalerMap();

  double branch_point() const { return a_; }
  double operator()(double x) const {
    return x <= a_ ? left(x) : (x - a_) / (1.0 - a_);
  }
  static double left(double x) { return x <= 0.0 ? 0.0 : x + x * x * std::exp(-1.0 / x); }

  std::array<BranchDomain, 2> branches() const {
    return {BranchDomain{0.0, a_, true}, BranchDomain{a_, 1.0, false}};
  }
  double branch_eval(int branch, double x) const {
    return branch == 0 ? left(x) : (x - a_) / (1.0 - a_);
  }
  double branch_inverse(int branch, double y) const;
  static constexpr const char* name() { return "thaler"; }

 private:
  double a_;
};

/// x/(1-x) on [0, 1/2], 2x - 1 on (1/2, 1].
struct LasotaYorkeMap {
  double operator()(double x) const { return x <= 0.5 ? x / (1.0 - x) : 2.0 * x - 1.0; }
  std::array<BranchDomain, 2> branches() const {
    return {BranchDomain{0.0, 0.5, true}, BranchDomain{0.5, 1.0, false}};
  }
  double branch_eval(int branch, double x) const {
    return branch == 0 ? x / (1.0 - x) : 2.0 * x - 1.0;
  }
  double branch_inverse(int branch, double y) const {
    return branch == 0 ? y / (1.0 + y) : 0.5 * (y + 1.0);
  }
  static constexpr const char* name() { return "lasota_yorke"; }
};

/// Sanity map: 2x on [0, 1/2], 2x - 1 on (1/2, 1]. Lebesgue measure is invariant.
struct DoublingMap {
  double operator()(double x) const { return x <= 0.5 ? 2.0 * x : 2.0 * x - 1.0; }
  std::array<BranchDomain, 2> branches() const {
    return {BranchDomain{0.0, 0.5, true}, BranchDomain{0.5, 1.0, false}};
  }
  double branch_eval(int branch, double x) const {
    return branch == 0 ? 2.0 * x : 2.0 * x - 1.0;
  }
  double branch_inverse(int branch, double y) const {
    return branch == 0 ? 0.5 * y : 0.5 * (y + 1.0);
  }
  static constexpr const char* name() { return "doubling"; }
};

using IntervalMap = std::variant<ThalerMap, LasotaYorkeMap, DoublingMap>;

/// Root of x + x^2 e^{-1/x} = 1 by bisection on [0.5, 1].
double thaler_branch_point();

/// T(x). Throws std::domain_error outside [0, 1].
double map_eval(const IntervalMap& map, double x);

std::string map_name(const IntervalMap& map);

struct ReturnResult {
  std::uint64_t phi = 0;  // first n >= 1 with T^n x in A; equals cap when exceeded
  bool exceeded = false;
  double point = 0.0;     // T^phi x (last iterate computed when exceeded)
};

/// First return (entry) time to A with an iteration cap. Throws
/// std::invalid_argument for cap == 0 or an empty A, std::domain_error for
/// x outside [0, 1].
ReturnResult return_time(const IntervalMap& map, Interval A, double x,
                         std::uint64_t cap);

// ---------------------------------------------------------------------------
// Renewal shift

/// P(phi > n) = (n+1)^{-alpha}
struct PurePower {
  double alpha;
};
/// P(phi > n) = 1/(n+1)
struct Harmonic {};
/// P(phi > n) = 1/ln(n+e)
struct InverseLog {};

using TailKind = std::variant<PurePower, Harmonic, InverseLog>;

/// Parses "power:ALPHA", "harmonic" or "invlog".
TailKind parse_tail(const std::string& text);
std::string tail_name(const TailKind& tail);

/// P(phi > n).
double tail_prob(const TailKind& tail, std::uint64_t n);

/// P(phi = k) = P(phi > k-1) - P(phi > k) for k >= 1, without cancellation.
double return_prob(const TailKind& tail, std::uint64_t k);

constexpr std::uint64_t kNoHorizon = std::uint64_t{1} << 62;

/// Inverse-transform draw phi = min{n >= 1 : P(phi > n) < u}. Values beyond
/// `horizon` are returned as horizon + 1.
std::uint64_t renewal_sample_phi(const TailKind& tail, double u,
                                 std::uint64_t horizon = kNoHorizon);

/// u_0 = 1, u_n = sum_{k=1}^{n} p_k u_{n-k}: the probability of being in A at
/// time n given a start in A. O(n_max^2).
std::vector<double> renewal_u_sequence(const TailKind& tail, std::uint64_t n_max);

/// Same recursion for an arbitrary tail table t_0 = 1 >= t_1 >= ...
std::vector<double> renewal_u_sequence(const std::vector<double>& tail_values,
                                       std::uint64_t n_max);

/// Initial delay of a renewal path.
struct AtRenewal {};
/// First renewal at D with P(D = d) proportional to P(phi > d), d <= cap.
struct DelayTail {
  std::uint64_t cap;
};
using Delay = std::variant<AtRenewal, DelayTail>;

struct RenewalShift {
  TailKind tail;
  Delay delay = AtRenewal{};
};

// ---------------------------------------------------------------------------
// Initial distributions

struct LebesgueOn {
  Interval support;
};
struct UniformOnA {};
/// Deterministic start, for debugging only: not absolutely continuous.
struct PointMass {
  double x;
};
using InitialDistribution = std::variant<LebesgueOn, UniformOnA, PointMass>;

bool is_admissible(const InitialDistribution& init);

/// Draws a starting point for an interval-map orbit.
double sample_initial(const InitialDistribution& init, Interval A, Rng& rng);

/// Parses "uniform_on_a", "lebesgue:LO,HI" or "point:X".
InitialDistribution parse_initial(const std::string& text);

}  // namespace erglab
