#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace rwprop {

/// Symmetric M-matrix stored as a weighted graph: A = diag(leak) + Laplacian(w).
/// Off-diagonal entries are -weight; the diagonal is leak + sum of weights and
/// is always formed by adding positive terms.
struct WeightedOperator {
  std::size_t n = 0;
  std::vector<std::size_t> row_ptr{0};
  std::vector<std::uint32_t> col;   // no self loops, ascending per row
  std::vector<double> weight;       // > 0
  std::vector<double> leak;         // >= 0
  std::vector<double> diag;

  void finalize_diagonal();
  // y = A x in difference form: leak_i x_i + sum_j w_ij (x_i - x_j).
  void apply(std::span<const double> x, std::span<double> y) const;
};

/// Exact factorization of a small WeightedOperator by Gaussian elimination
/// in which pivots and Schur-complement entries are built from sums of
/// positive quantities only.
class DenseLaplacianFactor {
 public:
  DenseLaplacianFactor() = default;
  explicit DenseLaplacianFactor(const WeightedOperator& op);

  void solve(std::span<const double> rhs, std::span<double> x) const;
  std::size_t size() const noexcept { return n_; }

 private:
  std::size_t n_ = 0;
  std::vector<double> w_;      // n x n, post-elimination couplings
  std::vector<double> pivot_;
};

/// Unsmoothed-aggregation multigrid V-cycle for weighted-graph operators.
/// Aggregates are grown along strong edges (w_ij >= theta * max of the two
/// endpoints' largest weights), so clusters that are internally tight but only
/// weakly tied to the rest are represented by one coarse unknown. Coarse
/// operators are obtained by summing inter-aggregate weights and leaks.
class AggregationMultigrid {
 public:
  struct Options {
    double strength = 0.25;
    std::size_t coarse_size = 400;
    std::size_t max_levels = 25;
    std::size_t smoothing_sweeps = 2;
  };

  explicit AggregationMultigrid(WeightedOperator fine);
  AggregationMultigrid(WeightedOperator fine, Options opts);

  std::size_t levels() const noexcept { return levels_.size(); }
  const WeightedOperator& level(std::size_t k) const noexcept { return levels_[k].op; }
  const std::vector<std::uint32_t>& aggregates(std::size_t k) const noexcept { return levels_[k].aggregate; }

  // z = M^{-1} r for one symmetric V-cycle starting from zero.
  void apply(std::span<const double> r, std::span<double> z) const;

 private:
  struct Level {
    WeightedOperator op;
    std::vector<std::uint32_t> aggregate;  // fine node -> coarse node (empty on the coarsest level)
  };

  void cycle(std::size_t k, std::span<const double> r, std::span<double> z) const;

  Options opts_;
  std::vector<Level> levels_;
  DenseLaplacianFactor coarse_;
  bool coarse_exact_ = false;
};

// Partitions nodes into aggregates; returns the aggregate id of each node and
// the number of aggregates via `count`.
std::vector<std::uint32_t> aggregate_strong(const WeightedOperator& op, double strength, std::size_t& count);

WeightedOperator coarsen(const WeightedOperator& op, const std::vector<std::uint32_t>& aggregate, std::size_t count);

}  // namespace rwprop
