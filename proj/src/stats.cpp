#include "erglab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "erglab/parallel.hpp"

namespace erglab {

EmpiricalCDF::EmpiricalCDF(std::vector<double> samples) : sorted_(std::move(samples)) {
  if (sorted_.empty()) throw std::invalid_argument("EmpiricalCDF: no samples");
  if (std::any_of(sorted_.begin(), sorted_.end(), [](double v) { return std::isnan(v); }))
    throw std::invalid_argument("EmpiricalCDF: NaN sample");
  std::sort(sorted_.begin(), sorted_.end());
}

double EmpiricalCDF::operator()(double x) const {
  const auto it = std::upper_bound(sorted_.begin(), sorted_.end(), x);
  return static_cast<double>(it - sorted_.begin()) / static_cast<double>(sorted_.size());
}

DiscreteLaw::DiscreteLaw(std::vector<double> atoms, std::vector<double> masses) {
  if (atoms.size() != masses.size() || atoms.empty())
    throw std::invalid_argument("DiscreteLaw: atoms and masses must be non-empty and equal length");
  std::vector<std::size_t> order(atoms.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return atoms[a] < atoms[b]; });
  double acc = 0.0;
  for (std::size_t idx : order) {
    if (masses[idx] < 0.0) throw std::invalid_argument("DiscreteLaw: negative mass");
    acc += masses[idx];
    if (!atoms_.empty() && atoms_.back() == atoms[idx]) {
      masses_.back() += masses[idx];
      cumulative_.back() = acc;
    } else {
      atoms_.push_back(atoms[idx]);
      masses_.push_back(masses[idx]);
      cumulative_.push_back(acc);
    }
  }
}

double DiscreteLaw::cdf(double x) const {
  const auto it = std::upper_bound(atoms_.begin(), atoms_.end(), x);
  if (it == atoms_.begin()) return 0.0;
  return cumulative_[static_cast<std::size_t>(it - atoms_.begin()) - 1];
}

double DiscreteLaw::quantile(double p) const {
  const auto it = std::lower_bound(cumulative_.begin(), cumulative_.end(), p);
  if (it == cumulative_.end()) return atoms_.back();
  return atoms_[static_cast<std::size_t>(it - cumulative_.begin())];
}

double ks_distance(const EmpiricalCDF& ecdf, const AlphaLaw& law) {
  const auto xs = ecdf.sorted();
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = cdf(law, xs[i]);
    const double above = static_cast<double>(i + 1) / n;
    const double below = static_cast<double>(i) / n;
    d = std::max({d, std::abs(above - f), std::abs(below - f)});
  }
  return d;
}

double ks_distance(const DiscreteLaw& discrete, const AlphaLaw& law) {
  const auto atoms = discrete.atoms();
  const auto masses = discrete.masses();
  double d = 0.0;
  double before = 0.0;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    const double f = cdf(law, atoms[i]);
    const double after = before + masses[i];
    d = std::max({d, std::abs(before - f), std::abs(after - f)});
    before = after;
  }
  return std::max(d, std::abs(1.0 - before));
}

double ks_distance(const EmpiricalCDF& ecdf, const DiscreteLaw& discrete) {
  // Both CDFs are right-continuous step functions, so the supremum is
  // attained at a jump of one of them.
  const auto xs = ecdf.sorted();
  const auto atoms = discrete.atoms();
  const double n = static_cast<double>(xs.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double fe = 0.0;
  double fd = 0.0;
  double cum = 0.0;
  double d = 0.0;
  while (i < xs.size() || j < atoms.size()) {
    const double next = j == atoms.size() || (i < xs.size() && xs[i] < atoms[j]) ? xs[i] : atoms[j];
    while (i < xs.size() && xs[i] <= next) ++i;
    while (j < atoms.size() && atoms[j] <= next) cum += discrete.masses()[j++];
    fe = static_cast<double>(i) / n;
    fd = cum;
    d = std::max(d, std::abs(fe - fd));
  }
  return d;
}

double dkw_bound(std::uint64_t n, double confidence) {
  if (n == 0) throw std::invalid_argument("dkw_bound: n must be >= 1");
  if (!(confidence > 0.0 && confidence <= 0.9999))
    throw std::invalid_argument("dkw_bound: confidence must lie in (0, 0.9999]");
  return std::sqrt(std::log(2.0 / (1.0 - confidence)) / (2.0 * static_cast<double>(n)));
}

SweepVerdict sweep_verdict(std::vector<SweepRow> rows, double threshold) {
  SweepVerdict v;
  v.rows = std::move(rows);
  for (std::size_t j = 0; j < v.rows.size(); ++j) {
    auto& row = v.rows[j];
    row.pass_trend = true;
    if (j > 0) {
      const auto& prev = v.rows[j - 1];
      row.pass_trend = row.ks <= prev.ks + prev.dkw95 + row.dkw95;
    }
    row.pass_gate = row.ks <= threshold;
    v.monotone_trend = v.monotone_trend && row.pass_trend;
  }
  v.final_gate = !v.rows.empty() && v.rows.back().pass_gate;
  return v;
}

DrawResult draw_statistic(const StatisticSampler& generator, std::uint64_t n,
                          std::uint64_t count, std::uint64_t seed, std::uint64_t stream,
                          unsigned threads) {
  std::vector<std::optional<double>> slots(count);
  parallel_for(count, threads, [&](std::size_t i) {
    Rng rng = Rng::stream(seed, stream, i);
    slots[i] = generator(n, rng);
  });
  DrawResult out;
  out.values.reserve(count);
  for (const auto& s : slots) {
    if (s)
      out.values.push_back(*s);
    else
      ++out.censored;
  }
  return out;
}

SweepVerdict convergence_sweep(const StatisticSampler& generator, const AlphaLaw& law,
                               std::span<const std::uint64_t> n_list,
                               const SweepOptions& options) {
  if (n_list.size() < 3) throw std::invalid_argument("convergence_sweep: need at least 3 horizons");
  if (!std::is_sorted(n_list.begin(), n_list.end()) ||
      std::adjacent_find(n_list.begin(), n_list.end()) != n_list.end())
    throw std::invalid_argument("convergence_sweep: horizons must be strictly increasing");
  if (options.samples_per_n == 0) throw std::invalid_argument("convergence_sweep: samples_per_n must be >= 1");
  std::vector<SweepRow> rows;
  for (std::size_t j = 0; j < n_list.size(); ++j) {
    const auto draws = draw_statistic(generator, n_list[j], options.samples_per_n, options.seed, j,
                                      options.threads);
    if (draws.values.empty())
      throw std::runtime_error("convergence_sweep: every path was censored");
    SweepRow row;
    row.n = n_list[j];
    row.samples = draws.values.size();
    row.censored = draws.censored;
    row.ks = ks_distance(EmpiricalCDF(draws.values), law);
    row.dkw95 = dkw_bound(row.samples, 0.95);
    rows.push_back(row);
  }
  return sweep_verdict(std::move(rows), options.threshold);
}

LineFit least_squares(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("least_squares: need at least two paired points");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("least_squares: x has no spread");
  return {sxy / sxx, my - sxy / sxx * mx};
}

double empirical_quantile(std::vector<double> values, double q) {
  if (values.empty()) throw std::invalid_argument("empirical_quantile: no values");
  if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("empirical_quantile: q outside [0,1]");
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

}  // namespace erglab
