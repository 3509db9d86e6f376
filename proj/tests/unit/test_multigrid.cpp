#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "rwprop/multigrid.hpp"

using namespace rwprop;

namespace {

// Random sparse weighted graph on n nodes with a few grounded rows.
WeightedOperator random_operator(std::size_t n, std::mt19937_64& rng, double wmin_exp) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<std::vector<std::pair<std::uint32_t, double>>> rows(n);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double w = std::pow(10.0, wmin_exp * u(rng));
    rows[i].push_back({static_cast<std::uint32_t>(i + 1), w});
    rows[i + 1].push_back({static_cast<std::uint32_t>(i), w});
    const std::size_t j = i + 2 + rng() % 7;
    if (j < n && u(rng) < 0.5) {
      rows[i].push_back({static_cast<std::uint32_t>(j), w});
      rows[j].push_back({static_cast<std::uint32_t>(i), w});
    }
  }
  WeightedOperator op;
  op.n = n;
  op.leak.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    std::sort(rows[i].begin(), rows[i].end());
    for (auto [j, w] : rows[i]) {
      op.col.push_back(j);
      op.weight.push_back(w);
    }
    op.row_ptr.push_back(op.col.size());
    if (u(rng) < 0.05) op.leak[i] = u(rng);
  }
  op.leak[0] = 1.0;
  op.finalize_diagonal();
  return op;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::fabs(a[i] - b[i]));
  return d;
}

}  // namespace

TEST(WeightedOperator, DifferenceFormMatchesDenseProduct) {
  std::mt19937_64 rng(7);
  const auto op = random_operator(40, rng, -3.0);
  std::vector<double> x(40), y(40);
  for (auto& v : x) v = std::uniform_real_distribution<double>(-1, 1)(rng);
  op.apply(x, y);
  for (std::size_t i = 0; i < op.n; ++i) {
    double expect = op.diag[i] * x[i];
    for (std::size_t k = op.row_ptr[i]; k < op.row_ptr[i + 1]; ++k) expect -= op.weight[k] * x[op.col[k]];
    EXPECT_NEAR(y[i], expect, 1e-12);
  }
}

TEST(DenseLaplacianFactor, SolvesExactly) {
  std::mt19937_64 rng(11);
  const auto op = random_operator(60, rng, -6.0);
  std::vector<double> x_true(60), b(60), x(60);
  for (auto& v : x_true) v = std::uniform_real_distribution<double>(0, 1)(rng);
  op.apply(x_true, b);
  DenseLaplacianFactor f(op);
  f.solve(b, x);
  EXPECT_LT(max_abs_diff(x, x_true), 1e-6);
}

TEST(Aggregation, CoarseningPreservesRowSums) {
  std::mt19937_64 rng(3);
  const auto op = random_operator(200, rng, -2.0);
  std::size_t count = 0;
  const auto agg = aggregate_strong(op, 0.25, count);
  ASSERT_EQ(agg.size(), op.n);
  EXPECT_LT(count, op.n);
  for (auto a : agg) EXPECT_LT(a, count);
  const auto coarse = coarsen(op, agg, count);
  EXPECT_EQ(coarse.n, count);
  double fine_leak = 0.0, coarse_leak = 0.0;
  for (double l : op.leak) fine_leak += l;
  for (double l : coarse.leak) coarse_leak += l;
  EXPECT_NEAR(fine_leak, coarse_leak, 1e-12);
  // P^T A 1 = A_c 1: coarse row sums equal summed leaks of each aggregate.
  std::vector<double> ones(count, 1.0), y(count);
  coarse.apply(ones, y);
  for (std::size_t c = 0; c < count; ++c) EXPECT_NEAR(y[c], coarse.leak[c], 1e-12);
}

TEST(AggregationMultigrid, PreconditionerIsSymmetric) {
  std::mt19937_64 rng(5);
  AggregationMultigrid::Options opt;
  opt.coarse_size = 16;
  const AggregationMultigrid mg(random_operator(500, rng, -4.0), opt);
  EXPECT_GT(mg.levels(), 2u);
  std::vector<double> a(500), b(500), ma(500), mb(500);
  for (auto& v : a) v = std::uniform_real_distribution<double>(-1, 1)(rng);
  for (auto& v : b) v = std::uniform_real_distribution<double>(-1, 1)(rng);
  mg.apply(a, ma);
  mg.apply(b, mb);
  double bma = 0.0, amb = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < 500; ++i) {
    bma += b[i] * ma[i];
    amb += a[i] * mb[i];
    scale += std::fabs(b[i] * ma[i]);
  }
  EXPECT_NEAR(bma, amb, 1e-9 * scale);
}

TEST(AggregationMultigrid, ExactWhenSmallEnough) {
  std::mt19937_64 rng(9);
  const auto op = random_operator(100, rng, -2.0);
  const AggregationMultigrid mg(op);
  EXPECT_EQ(mg.levels(), 1u);
  std::vector<double> x_true(100, 0.3), b(100), x(100);
  x_true[17] = 0.9;
  op.apply(x_true, b);
  mg.apply(b, x);
  EXPECT_LT(max_abs_diff(x, x_true), 1e-10);
}
