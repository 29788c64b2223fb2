#include "erglab/transfer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

#include "erglab/parallel.hpp"

namespace erglab {

Partition::Partition(std::vector<double> edges) : edges_(std::move(edges)) {
  if (edges_.size() < 2) throw std::invalid_argument("Partition: need at least one cell");
  if (edges_.front() != 0.0 || edges_.back() != 1.0)
    throw std::invalid_argument("Partition: edges must run from 0 to 1");
  for (std::size_t i = 0; i + 1 < edges_.size(); ++i) {
    if (!(edges_[i + 1] - edges_[i] > 1e-14))
      throw std::invalid_argument("Partition: degenerate cell " + std::to_string(i));
  }
}

Partition Partition::uniform(std::size_t cells) {
  if (cells == 0) throw std::invalid_argument("Partition: need at least one cell");
  std::vector<double> e(cells + 1);
  for (std::size_t i = 0; i <= cells; ++i)
    e[i] = static_cast<double>(i) / static_cast<double>(cells);
  e.back() = 1.0;
  return Partition(std::move(e));
}

Partition Partition::geometric(std::size_t cells, double pivot, double ratio) {
  if (!(pivot > 0.0 && pivot < 1.0)) throw std::invalid_argument("Partition: pivot outside (0,1)");
  if (!(ratio > 0.0 && ratio < 1.0)) throw std::invalid_argument("Partition: ratio outside (0,1)");
  if (cells < 8) throw std::invalid_argument("Partition: geometric refinement needs >= 8 cells");
  const auto depth = static_cast<std::size_t>(std::floor(std::log(1e-12 / pivot) / std::log(ratio)));
  const std::size_t g = std::min(cells / 8, depth);
  const std::size_t upper = cells - g - 1;
  if (upper == 0) throw std::invalid_argument("Partition: no cells left above the pivot");
  std::vector<double> e;
  e.reserve(cells + 1);
  e.push_back(0.0);
  for (std::size_t k = g + 1; k-- > 1;) e.push_back(pivot * std::pow(ratio, static_cast<double>(k)));
  e.push_back(pivot);
  for (std::size_t k = 1; k <= upper; ++k)
    e.push_back(pivot + (1.0 - pivot) * static_cast<double>(k) / static_cast<double>(upper));
  e.back() = 1.0;
  return Partition(std::move(e));
}

std::size_t Partition::locate(double x) const {
  const auto it = std::upper_bound(edges_.begin(), edges_.end(), x);
  if (it == edges_.begin()) return 0;
  return std::min(static_cast<std::size_t>(it - edges_.begin()) - 1, size() - 1);
}

CellRange cells_in(const Partition& partition, Interval A) {
  CellRange r{partition.size(), partition.size()};
  for (std::size_t i = 0; i < partition.size(); ++i) {
    if (A.contains(partition.midpoint(i))) {
      if (r.first == partition.size()) r.first = i;
      r.last = i + 1;
    }
  }
  if (r.first == partition.size()) throw std::invalid_argument("cells_in: A contains no cell midpoint");
  return r;
}

// ---------------------------------------------------------------------------

UlamOperator::UlamOperator(Partition partition, std::string map_tag,
                           std::vector<std::size_t> row_ptr, std::vector<std::size_t> cols,
                           std::vector<double> values)
    : partition_(std::move(partition)),
      map_tag_(std::move(map_tag)),
      row_ptr_(std::move(row_ptr)),
      cols_(std::move(cols)),
      values_(std::move(values)) {
  const std::size_t m = partition_.size();
  if (row_ptr_.size() != m + 1 || cols_.size() != values_.size() || row_ptr_.back() != values_.size())
    throw std::invalid_argument("UlamOperator: inconsistent sparse layout");
  for (std::size_t i = 0; i < m; ++i) {
    double sum = 0.0;
    for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
      if (cols_[k] >= m || !(values_[k] >= 0.0))
        throw std::invalid_argument("UlamOperator: bad entry in row " + std::to_string(i));
      sum += values_[k];
    }
    if (std::abs(sum - 1.0) > 1e-12)
      throw std::invalid_argument("UlamOperator: row " + std::to_string(i) + " is not stochastic");
  }
}

double UlamOperator::entry(std::size_t i, std::size_t j) const {
  const auto cols = row_cols(i);
  const auto it = std::lower_bound(cols.begin(), cols.end(), j);
  if (it == cols.end() || *it != j) return 0.0;
  return values_[row_ptr_[i] + static_cast<std::size_t>(it - cols.begin())];
}

std::span<const std::size_t> UlamOperator::row_cols(std::size_t i) const {
  return {cols_.data() + row_ptr_[i], row_ptr_[i + 1] - row_ptr_[i]};
}

std::span<const double> UlamOperator::row_values(std::size_t i) const {
  return {values_.data() + row_ptr_[i], row_ptr_[i + 1] - row_ptr_[i]};
}

std::vector<double> UlamOperator::push(std::span<const double> density) const {
  const std::size_t m = size();
  if (density.size() != m) throw std::invalid_argument("push: density has the wrong length");
  std::vector<double> mass(m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    const double w = density[i] * partition_.width(i);
    if (w == 0.0) continue;
    for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) mass[cols_[k]] += w * values_[k];
  }
  for (std::size_t j = 0; j < m; ++j) mass[j] /= partition_.width(j);
  return mass;
}

namespace {

using Row = std::vector<std::pair<std::size_t, double>>;

// Sorts by column, merges duplicates and normalizes to a stochastic row.
void finish_row(Row& row, std::size_t i) {
  std::sort(row.begin(), row.end());
  Row merged;
  double sum = 0.0;
  for (const auto& [j, v] : row) {
    if (v <= 0.0) continue;
    sum += v;
    if (!merged.empty() && merged.back().first == j)
      merged.back().second += v;
    else
      merged.emplace_back(j, v);
  }
  if (!(sum > 0.0)) throw std::runtime_error("build_ulam: degenerate cell " + std::to_string(i));
  for (auto& e : merged) e.second /= sum;
  row = std::move(merged);
}

template <class Map>
Row exact_row(const Map& m, const Partition& p, std::size_t i) {
  Row row;
  const auto branches = m.branches();
  for (int b = 0; b < static_cast<int>(branches.size()); ++b) {
    const double dlo = std::max(p.lo(i), branches[b].lo);
    const double dhi = std::min(p.hi(i), branches[b].hi);
    if (!(dhi > dlo)) continue;
    const std::size_t jlo = p.locate(m.branch_eval(b, dlo));
    const std::size_t jhi = p.locate(m.branch_eval(b, dhi));
    // Preimages of the cell edges, clamped so the pieces telescope to dhi - dlo.
    double left = dlo;
    for (std::size_t j = jlo; j <= jhi; ++j) {
      double right = j == jhi ? dhi : std::clamp(m.branch_inverse(b, p.hi(j)), dlo, dhi);
      right = std::max(right, left);
      row.emplace_back(j, right - left);
      left = right;
    }
  }
  finish_row(row, i);
  return row;
}

UlamOperator assemble(const Partition& partition, std::string tag, std::vector<Row>& rows) {
  std::vector<std::size_t> row_ptr{0};
  std::vector<std::size_t> cols;
  std::vector<double> values;
  for (const auto& row : rows) {
    for (const auto& [j, v] : row) {
      cols.push_back(j);
      values.push_back(v);
    }
    row_ptr.push_back(cols.size());
  }
  return UlamOperator(partition, std::move(tag), std::move(row_ptr), std::move(cols),
                      std::move(values));
}

}  // namespace

UlamOperator build_ulam_exact(const IntervalMap& map, const Partition& partition, unsigned threads) {
  std::vector<Row> rows(partition.size());
  std::visit(
      [&](const auto& m) {
        parallel_for(partition.size(), threads,
                     [&](std::size_t i) { rows[i] = exact_row(m, partition, i); });
      },
      map);
  return assemble(partition, map_name(map), rows);
}

UlamOperator build_ulam_mc(const IntervalMap& map, const Partition& partition,
                           std::uint64_t samples_per_cell, std::uint64_t seed, unsigned threads) {
  if (samples_per_cell < 100) throw std::invalid_argument("build_ulam_mc: samples_per_cell must be >= 100");
  std::vector<Row> rows(partition.size());
  const double s = static_cast<double>(samples_per_cell);
  std::visit(
      [&](const auto& m) {
        parallel_for(partition.size(), threads, [&](std::size_t i) {
          Rng rng = Rng::stream(seed, i);
          const double lo = partition.lo(i);
          const double w = partition.width(i);
          std::vector<std::size_t> hits(samples_per_cell);
          for (std::uint64_t k = 0; k < samples_per_cell; ++k) {
            const double x = std::min(lo + w * (static_cast<double>(k) + rng.uniform()) / s, 1.0);
            hits[k] = partition.locate(m(x));
          }
          std::sort(hits.begin(), hits.end());
          Row row;
          for (std::size_t k = 0; k < hits.size();) {
            std::size_t e = k;
            while (e < hits.size() && hits[e] == hits[k]) ++e;
            row.emplace_back(hits[k], static_cast<double>(e - k));
            k = e;
          }
          finish_row(row, i);
          rows[i] = std::move(row);
        });
      },
      map);
  return assemble(partition, map_name(map), rows);
}

// ---------------------------------------------------------------------------

double total_mass(const Partition& partition, std::span<const double> g) {
  if (g.size() != partition.size()) throw std::invalid_argument("total_mass: density has the wrong length");
  double s = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) s += g[i] * partition.width(i);
  return s;
}

std::vector<double> indicator_density(const Partition& partition, Interval A) {
  const CellRange r = cells_in(partition, A);
  double len = 0.0;
  for (std::size_t i = r.first; i < r.last; ++i) len += partition.width(i);
  std::vector<double> g(partition.size(), 0.0);
  for (std::size_t i = r.first; i < r.last; ++i) g[i] = 1.0 / len;
  return g;
}

namespace {

void check_density(const Partition& partition, std::span<const double> g) {
  if (g.size() != partition.size()) throw std::invalid_argument("density has the wrong length");
  if (std::any_of(g.begin(), g.end(), [](double v) { return !(v >= 0.0) || !std::isfinite(v); }))
    throw std::invalid_argument("density must be finite and nonnegative");
  if (std::abs(total_mass(partition, g) - 1.0) > 1e-10)
    throw std::invalid_argument("density must have cell-weighted mass 1");
}

}  // namespace

std::vector<DensityCheckpoint> push_density(const UlamOperator& op, std::span<const double> g,
                                            std::uint64_t steps, std::uint64_t every) {
  check_density(op.partition(), g);
  if (every == 0) throw std::invalid_argument("push_density: every must be >= 1");
  std::vector<DensityCheckpoint> out;
  std::vector<double> cur(g.begin(), g.end());
  out.push_back({0, cur});
  for (std::uint64_t k = 1; k <= steps; ++k) {
    cur = op.push(cur);
    if (k % every == 0 || k == steps) out.push_back({k, cur});
  }
  return out;
}

DensityShape estimate_density_shape(const UlamOperator& op, Interval A, std::uint64_t n_cesaro,
                                    double cut, std::uint64_t burn_in) {
  if (n_cesaro == 0) throw std::invalid_argument("estimate_density_shape: n_cesaro must be >= 1");
  if (!(cut > 0.0 && cut < 1.0)) throw std::invalid_argument("estimate_density_shape: cut outside (0,1)");
  if (!(A.lo >= cut)) throw std::invalid_argument("estimate_density_shape: A must lie above cut");
  const Partition& p = op.partition();
  const CellRange a = cells_in(p, A);

  std::vector<double> cur(p.size(), 1.0);
  for (std::uint64_t k = 0; k < burn_in; ++k) cur = op.push(cur);
  std::vector<double> sum(p.size(), 0.0);
  for (std::uint64_t k = 0; k < n_cesaro; ++k) {
    for (std::size_t i = 0; i < p.size(); ++i) sum[i] += cur[i];
    if (k + 1 < n_cesaro) cur = op.push(cur);
  }

  DensityShape out;
  out.first_cell = p.size();
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p.lo(i) >= cut) {
      out.first_cell = i;
      break;
    }
  }
  out.h.assign(p.size(), 0.0);
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = a.first; i < a.last; ++i) {
    num += sum[i] * p.width(i);
    den += p.width(i);
  }
  if (!(num > 0.0)) throw std::runtime_error("estimate_density_shape: no Cesàro mass on A");
  const double scale = den / num;
  double hmax = 0.0;
  for (std::size_t i = out.first_cell; i < p.size(); ++i) {
    out.h[i] = sum[i] * scale;
    hmax = std::max(hmax, out.h[i]);
  }
  for (std::size_t i = out.first_cell; i < p.size(); ++i)
    if (out.h[i] < 1e-12 * hmax) ++out.floor_cells;
  return out;
}

// ---------------------------------------------------------------------------

namespace {

struct Prepared {
  CellRange a;
  double h_mass = 0.0;  // sum over A cells of h |I|
  std::size_t floor_cells = 0;
};

Prepared prepare(const UlamOperator& op, Interval A, std::span<const double> g, const TailTable& W,
                 double beta, const DensityShape& h, std::span<const std::uint64_t> n_grid) {
  const Partition& p = op.partition();
  check_density(p, g);
  if (!(A.lo > 0.0)) throw std::invalid_argument("ratio check: A must be bounded away from 0");
  if (!(beta >= 0.0 && beta <= 1.0)) throw std::invalid_argument("ratio check: beta outside [0,1]");
  if (h.h.size() != p.size()) throw std::invalid_argument("ratio check: density shape has the wrong length");
  if (n_grid.empty() || n_grid.front() == 0 || !std::is_sorted(n_grid.begin(), n_grid.end()) ||
      std::adjacent_find(n_grid.begin(), n_grid.end()) != n_grid.end())
    throw std::invalid_argument("ratio check: n_grid must be strictly increasing and positive");
  if (n_grid.back() > W.max_index())
    throw std::out_of_range("ratio check: wandering table does not cover the grid");
  Prepared out;
  out.a = cells_in(p, A);
  double hmax = 0.0;
  for (std::size_t i = out.a.first; i < out.a.last; ++i) hmax = std::max(hmax, h.h[i]);
  for (std::size_t i = out.a.first; i < out.a.last; ++i) {
    if (!(h.h[i] > 0.0))
      throw std::runtime_error("ratio check: density shape vanishes on A (cell " + std::to_string(i) + ")");
    if (h.h[i] < 1e-12 * hmax) ++out.floor_cells;
    out.h_mass += h.h[i] * p.width(i);
  }
  return out;
}

RatioRow summarize(std::uint64_t n, std::vector<double> curve, double integrated) {
  RatioRow row;
  row.n = n;
  row.integrated = integrated;
  row.sup_ratio = *std::max_element(curve.begin(), curve.end());
  row.inf_ratio = *std::min_element(curve.begin(), curve.end());
  const std::size_t mid = curve.size() / 2;
  std::nth_element(curve.begin(), curve.begin() + static_cast<std::ptrdiff_t>(mid), curve.end());
  row.median_ratio = curve[mid];
  if (curve.size() % 2 == 0) {
    const double below = *std::max_element(curve.begin(), curve.begin() + static_cast<std::ptrdiff_t>(mid));
    row.median_ratio = 0.5 * (row.median_ratio + below);
  }
  return row;
}

void record(RatioReport& report, const Partition& p, const Prepared& prep, const DensityShape& h,
            std::span<const double> values, std::uint64_t n, double factor) {
  std::vector<double> curve;
  curve.reserve(prep.a.size());
  double mass = 0.0;
  for (std::size_t i = prep.a.first; i < prep.a.last; ++i) {
    curve.push_back(factor * values[i] / h.h[i]);
    mass += values[i] * p.width(i);
  }
  report.rows.push_back(summarize(n, curve, factor * mass / prep.h_mass));
  report.curves.push_back(std::move(curve));
}

}  // namespace

RatioReport check_uniformly_returning(const UlamOperator& op, Interval A,
                                      std::span<const double> g, const TailTable& W,
                                      double beta, const DensityShape& h,
                                      std::span<const std::uint64_t> n_grid) {
  // Gamma(1 - beta) has a pole at beta = 1
  if (!(beta < 1.0)) throw std::invalid_argument("check_uniformly_returning: beta must be < 1");
  const Prepared prep = prepare(op, A, g, W, beta, h, n_grid);
  RatioReport report;
  report.a_cells = prep.a;
  report.floor_cells = prep.floor_cells;
  const double gamma_factor = std::tgamma(1.0 - beta) * std::tgamma(1.0 + beta);
  std::vector<double> cur(g.begin(), g.end());
  std::uint64_t step = 0;
  for (const std::uint64_t n : n_grid) {
    while (step < n) {
      cur = op.push(cur);
      ++step;
    }
    record(report, op.partition(), prep, h, cur, n, W.wandering(n) * gamma_factor);
  }
  return report;
}

double uniform_normalizer(const TailTable& W, double beta, std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("uniform_normalizer: n must be >= 1");
  return static_cast<double>(n) / (std::tgamma(2.0 - beta) * std::tgamma(1.0 + beta) * W.wandering(n));
}

RatioReport check_uniform(const UlamOperator& op, Interval A, std::span<const double> g,
                          const TailTable& W, double beta, const DensityShape& h,
                          std::span<const std::uint64_t> n_grid) {
  const Prepared prep = prepare(op, A, g, W, beta, h, n_grid);
  RatioReport report;
  report.a_cells = prep.a;
  report.floor_cells = prep.floor_cells;
  std::vector<double> cur(g.begin(), g.end());
  std::vector<double> sum(g.size(), 0.0);
  std::size_t next = 0;
  for (std::uint64_t k = 0; next < n_grid.size(); ++k) {
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += cur[i];
    if (k + 1 == n_grid[next]) {
      record(report, op.partition(), prep, h, sum, k + 1, 1.0 / uniform_normalizer(W, beta, k + 1));
      ++next;
    }
    if (next < n_grid.size()) cur = op.push(cur);
  }
  return report;
}

double median_doubling_ratio(const RatioReport& report, std::uint64_t n) {
  auto find = [&](std::uint64_t m) {
    for (std::size_t j = 0; j < report.rows.size(); ++j)
      if (report.rows[j].n == m) return j;
    throw std::invalid_argument("median_doubling_ratio: horizon " + std::to_string(m) + " not in the report");
  };
  const auto& c1 = report.curves[find(n)];
  const auto& c2 = report.curves[find(2 * n)];
  std::vector<double> r;
  r.reserve(c1.size());
  for (std::size_t i = 0; i < c1.size(); ++i)
    if (c1[i] > 0.0) r.push_back(c2[i] / c1[i]);
  if (r.empty()) throw std::runtime_error("median_doubling_ratio: no positive cells");
  const std::size_t mid = r.size() / 2;
  std::nth_element(r.begin(), r.begin() + static_cast<std::ptrdiff_t>(mid), r.end());
  double med = r[mid];
  if (r.size() % 2 == 0)
    med = 0.5 * (med + *std::max_element(r.begin(), r.begin() + static_cast<std::ptrdiff_t>(mid)));
  return med;
}

}  // namespace erglab
