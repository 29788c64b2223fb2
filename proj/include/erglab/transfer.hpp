#pragma once

// Ulam discretization of the transfer operator with respect to Lebesgue
// measure, density pushes, and the numeric uniform / uniformly returning
// set checks.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "erglab/dynamics.hpp"
#include "erglab/processes.hpp"
#include "erglab/rng.hpp"

namespace erglab {

class Partition {
 public:
  /// Validates 0 = c_0 < ... < c_M = 1 with every cell wider than 1e-14.
  explicit Partition(std::vector<double> edges);

  static Partition uniform(std::size_t cells);
  /// Geometric cells c_j ∝ ratio^(G-j) below `pivot`, one cell [0, pivot r^G],
  /// uniform cells above. G = min(cells/8, depth where pivot r^G reaches 1e-12).
  static Partition geometric(std::size_t cells, double pivot = 0.05, double ratio = 0.9);

  std::size_t size() const { return edges_.size() - 1; }
  std::span<const double> edges() const { return edges_; }
  double lo(std::size_t i) const { return edges_[i]; }
  double hi(std::size_t i) const { return edges_[i + 1]; }
  double width(std::size_t i) const { return edges_[i + 1] - edges_[i]; }
  double midpoint(std::size_t i) const { return 0.5 * (edges_[i] + edges_[i + 1]); }
  /// Cell index holding x; x = 1 belongs to the last cell.
  std::size_t locate(double x) const;

 private:
  std::vector<double> edges_;
};

/// Cells whose midpoint lies in A, as the half-open index range [first, last).
struct CellRange {
  std::size_t first = 0;
  std::size_t last = 0;
  std::size_t size() const { return last - first; }
};
CellRange cells_in(const Partition& partition, Interval A);

/// Row-stochastic sparse matrix P with P_ij ~ lambda(I_i ∩ T^{-1} I_j) / lambda(I_i).
class UlamOperator {
 public:
  UlamOperator(Partition partition, std::string map_tag, std::vector<std::size_t> row_ptr,
               std::vector<std::size_t> cols, std::vector<double> values);

  const Partition& partition() const { return partition_; }
  const std::string& map_tag() const { return map_tag_; }
  std::size_t size() const { return partition_.size(); }
  std::size_t nonzeros() const { return values_.size(); }

  double entry(std::size_t i, std::size_t j) const;
  /// (col, value) pairs of row i.
  std::span<const std::size_t> row_cols(std::size_t i) const;
  std::span<const double> row_values(std::size_t i) const;

  /// One step of the transfer operator on a cell density (density w.r.t.
  /// Lebesgue, constant on cells).
  std::vector<double> push(std::span<const double> density) const;

 private:
  Partition partition_;
  std::string map_tag_;
  std::vector<std::size_t> row_ptr_;
  std::vector<std::size_t> cols_;
  std::vector<double> values_;
};

enum class UlamMode { kExact, kMonteCarlo };

/// Exact entries from the branch inverses.
UlamOperator build_ulam_exact(const IntervalMap& map, const Partition& partition,
                              unsigned threads = 0);

/// Jittered stratified Monte-Carlo entries: sample s of cell i sits at
/// lo + width (s + U)/samples_per_cell, with row i drawing from
/// Rng::stream(seed, i). samples_per_cell >= 100.
UlamOperator build_ulam_mc(const IntervalMap& map, const Partition& partition,
                           std::uint64_t samples_per_cell, std::uint64_t seed,
                           unsigned threads = 0);

struct DensityCheckpoint {
  std::uint64_t step = 0;
  std::vector<double> density;
};

/// g, gT, gT^2, ... kept at steps 0, every, 2 every, ... and at `steps`.
/// g must be nonnegative with cell-weighted sum 1 (within 1e-10).
std::vector<DensityCheckpoint> push_density(const UlamOperator& op, std::span<const double> g,
                                            std::uint64_t steps, std::uint64_t every = 1);

/// Cell-weighted total mass sum_i g_i |I_i|.
double total_mass(const Partition& partition, std::span<const double> g);

/// The normalized indicator of A as a cell density (mass 1 on cells_in(A)).
std::vector<double> indicator_density(const Partition& partition, Interval A);

struct DensityShape {
  std::vector<double> h;        // 0 on cells below `cut`
  std::size_t first_cell = 0;   // first retained cell
  std::size_t floor_cells = 0;  // retained cells below 1e-12 * max h
};

/// Shape of the invariant density from the Cesàro sum of n_cesaro pushes of
/// the seed density T^burn_in 1, restricted to cells with lo >= cut and
/// normalized to Lebesgue mean 1 over the cells of A. The burn-in removes the
/// early transient, which otherwise dominates the error of the sum.
DensityShape estimate_density_shape(const UlamOperator& op, Interval A, std::uint64_t n_cesaro,
                                    double cut, std::uint64_t burn_in = 0);

struct RatioRow {
  std::uint64_t n = 0;
  double sup_ratio = 0.0;
  double inf_ratio = 0.0;
  double median_ratio = 0.0;
  double integrated = 0.0;  // the same normalization applied to the mass on A
  double spread() const { return sup_ratio / inf_ratio; }
};

struct RatioReport {
  CellRange a_cells;
  std::vector<RatioRow> rows;
  std::vector<std::vector<double>> curves;  // per n, the ratio on each A cell
  std::size_t floor_cells = 0;              // A cells where h is below the floor
};

/// r_n(x) = W_n Γ(1-β)Γ(1+β) (T^n g)(x) / h(x) over the A cells.
RatioReport check_uniformly_returning(const UlamOperator& op, Interval A,
                                      std::span<const double> g, const TailTable& W,
                                      double beta, const DensityShape& h,
                                      std::span<const std::uint64_t> n_grid);

/// a_n = n / (Γ(2-β)Γ(1+β) W_n), β the regular-variation index of W_n.
double uniform_normalizer(const TailTable& W, double beta, std::uint64_t n);

/// (1/a_n) sum_{k<n} (T^k g)(x) / h(x) over the A cells.
RatioReport check_uniform(const UlamOperator& op, Interval A, std::span<const double> g,
                          const TailTable& W, double beta, const DensityShape& h,
                          std::span<const std::uint64_t> n_grid);

/// Cell-wise median of curve(2n) / curve(n); both horizons must be in the report.
double median_doubling_ratio(const RatioReport& report, std::uint64_t n);

}  // namespace erglab
