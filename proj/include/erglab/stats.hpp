#pragma once

// Empirical distributions, Kolmogorov-Smirnov distances, DKW bands and
// convergence sweeps over n.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "erglab/limits.hpp"
#include "erglab/rng.hpp"

namespace erglab {

class EmpiricalCDF {
 public:
  /// Sorts the sample. Throws std::invalid_argument when empty or when a
  /// value is NaN.
  explicit EmpiricalCDF(std::vector<double> samples);

  std::size_t size() const { return sorted_.size(); }
  std::span<const double> sorted() const { return sorted_; }
  /// Fraction of samples <= x.
  double operator()(double x) const;

 private:
  std::vector<double> sorted_;
};

/// A finitely supported law: strictly increasing atoms with their masses.
class DiscreteLaw {
 public:
  /// Atoms may arrive unsorted and repeated; equal atoms are merged.
  DiscreteLaw(std::vector<double> atoms, std::vector<double> masses);

  std::span<const double> atoms() const { return atoms_; }
  std::span<const double> masses() const { return masses_; }
  double total_mass() const { return cumulative_.empty() ? 0.0 : cumulative_.back(); }
  double cdf(double x) const;
  /// Smallest atom whose cumulative mass reaches p.
  double quantile(double p) const;

 private:
  std::vector<double> atoms_;
  std::vector<double> masses_;
  std::vector<double> cumulative_;
};

/// sup_i max(|i/n - F(x_i)|, |(i-1)/n - F(x_i)|) for a continuous law.
double ks_distance(const EmpiricalCDF& ecdf, const AlphaLaw& law);

/// Exact sup-distance between a discrete law and a continuous one.
double ks_distance(const DiscreteLaw& discrete, const AlphaLaw& law);

/// Exact sup-distance between an empirical CDF and a discrete law.
double ks_distance(const EmpiricalCDF& ecdf, const DiscreteLaw& discrete);

/// sqrt(ln(2/(1 - confidence)) / (2n)). Confidence is capped at 0.9999.
double dkw_bound(std::uint64_t n, double confidence);

/// A statistic drawn for horizon n; nullopt marks a censored path.
using StatisticSampler = std::function<std::optional<double>(std::uint64_t n, Rng& rng)>;

struct SweepRow {
  std::uint64_t n = 0;
  std::uint64_t samples = 0;
  std::uint64_t censored = 0;
  double ks = 0.0;
  double dkw95 = 0.0;
  bool pass_trend = true;  // ks <= previous ks + both DKW bands
  bool pass_gate = true;   // only meaningful on the last row
};

struct SweepVerdict {
  std::vector<SweepRow> rows;
  bool monotone_trend = true;
  bool final_gate = false;
  bool passed() const { return monotone_trend && final_gate; }
};

/// Trend and gate verdict for already computed per-n KS values.
SweepVerdict sweep_verdict(std::vector<SweepRow> rows, double threshold);

struct SweepOptions {
  std::uint64_t samples_per_n = 10'000;
  double threshold = 0.05;
  std::uint64_t seed = 0;
  unsigned threads = 0;
};

/// For every n, draws samples_per_n values of the statistic (sample i at
/// position j of n_list uses Rng::stream(seed, j, i)), computes the KS
/// distance to `law` and applies the trend + final-gate verdict.
SweepVerdict convergence_sweep(const StatisticSampler& generator, const AlphaLaw& law,
                               std::span<const std::uint64_t> n_list,
                               const SweepOptions& options);

/// Draws `count` values of a statistic in parallel with per-sample streams
/// (seed, stream, i); censored draws are dropped and counted.
struct DrawResult {
  std::vector<double> values;
  std::uint64_t censored = 0;
};
DrawResult draw_statistic(const StatisticSampler& generator, std::uint64_t n,
                          std::uint64_t count, std::uint64_t seed, std::uint64_t stream,
                          unsigned threads);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
};

/// Ordinary least squares y = intercept + slope * x.
LineFit least_squares(std::span<const double> x, std::span<const double> y);

/// Linear-interpolated empirical quantile, q in [0, 1].
double empirical_quantile(std::vector<double> values, double q);

}  // namespace erglab
