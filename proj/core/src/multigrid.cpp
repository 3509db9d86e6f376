#include "rwprop/multigrid.hpp"

#include <algorithm>
#include <numeric>

#include "rwprop/error.hpp"

namespace rwprop {

void WeightedOperator::finalize_diagonal() {
  diag.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double d = leak[i];
    for (std::size_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k) d += weight[k];
    diag[i] = d;
  }
}

void WeightedOperator::apply(std::span<const double> x, std::span<double> y) const {
  for (std::size_t i = 0; i < n; ++i) {
    const double xi = x[i];
    double acc = leak[i] * xi;
    for (std::size_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k) acc += weight[k] * (xi - x[col[k]]);
    y[i] = acc;
  }
}

DenseLaplacianFactor::DenseLaplacianFactor(const WeightedOperator& op) : n_(op.n) {
  const std::size_t n = n_;
  w_.assign(n * n, 0.0);
  std::vector<double> leak = op.leak;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = op.row_ptr[i]; k < op.row_ptr[i + 1]; ++k) w_[i * n + op.col[k]] = op.weight[k];
  }
  pivot_.assign(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    double d = leak[k];
    for (std::size_t j = k + 1; j < n; ++j) d += w_[k * n + j];
    if (!(d > 0.0)) throw Error(ErrorCode::SeedlessComponent, "coarse operator is singular");
    pivot_[k] = d;
    for (std::size_t i = k + 1; i < n; ++i) {
      const double wik = w_[i * n + k];
      if (wik == 0.0) continue;
      const double f = wik / d;
      leak[i] += f * leak[k];
      double* row_i = &w_[i * n];
      const double* row_k = &w_[k * n];
      for (std::size_t j = k + 1; j < n; ++j) {
        if (j != i) row_i[j] += f * row_k[j];
      }
    }
  }
}

void DenseLaplacianFactor::solve(std::span<const double> rhs, std::span<double> x) const {
  const std::size_t n = n_;
  std::vector<double> b(rhs.begin(), rhs.end());
  for (std::size_t k = 0; k < n; ++k) {
    if (b[k] == 0.0) continue;
    const double f = b[k] / pivot_[k];
    for (std::size_t i = k + 1; i < n; ++i) b[i] += w_[i * n + k] * f;
  }
  for (std::size_t k = n; k-- > 0;) {
    double acc = b[k];
    for (std::size_t j = k + 1; j < n; ++j) acc += w_[k * n + j] * x[j];
    x[k] = acc / pivot_[k];
  }
}

namespace {

constexpr std::uint32_t kUnassigned = 0xFFFFFFFFu;

std::vector<std::uint32_t> pairwise_matching(const WeightedOperator& op, std::size_t& count) {
  std::vector<std::uint32_t> agg(op.n, kUnassigned);
  count = 0;
  for (std::size_t i = 0; i < op.n; ++i) {
    if (agg[i] != kUnassigned) continue;
    std::uint32_t partner = kUnassigned;
    double best = 0.0;
    for (std::size_t k = op.row_ptr[i]; k < op.row_ptr[i + 1]; ++k) {
      const auto j = op.col[k];
      if (agg[j] == kUnassigned && op.weight[k] > best) {
        best = op.weight[k];
        partner = j;
      }
    }
    agg[i] = static_cast<std::uint32_t>(count);
    if (partner != kUnassigned) agg[partner] = static_cast<std::uint32_t>(count);
    ++count;
  }
  return agg;
}

}  // namespace

std::vector<std::uint32_t> aggregate_strong(const WeightedOperator& op, double strength, std::size_t& count) {
  const std::size_t n = op.n;
  std::vector<double> max_w(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = op.row_ptr[i]; k < op.row_ptr[i + 1]; ++k) max_w[i] = std::max(max_w[i], op.weight[k]);
  }
  auto strong = [&](std::size_t i, std::size_t k) {
    return op.weight[k] >= strength * std::max(max_w[i], max_w[op.col[k]]);
  };

  std::vector<std::uint32_t> agg(n, kUnassigned);
  count = 0;

  // Pass 1: a node whose strong neighbors are all free seeds an aggregate.
  for (std::size_t i = 0; i < n; ++i) {
    if (agg[i] != kUnassigned) continue;
    bool has_strong = false;
    bool all_free = true;
    for (std::size_t k = op.row_ptr[i]; k < op.row_ptr[i + 1]; ++k) {
      if (!strong(i, k)) continue;
      has_strong = true;
      if (agg[op.col[k]] != kUnassigned) all_free = false;
    }
    if (!has_strong || !all_free) continue;
    const auto id = static_cast<std::uint32_t>(count++);
    agg[i] = id;
    for (std::size_t k = op.row_ptr[i]; k < op.row_ptr[i + 1]; ++k) {
      if (strong(i, k)) agg[op.col[k]] = id;
    }
  }

  // Pass 2: attach leftovers to the most strongly connected pass-1 aggregate.
  const std::vector<std::uint32_t> first = agg;
  for (std::size_t i = 0; i < n; ++i) {
    if (agg[i] != kUnassigned) continue;
    double best = 0.0;
    for (std::size_t k = op.row_ptr[i]; k < op.row_ptr[i + 1]; ++k) {
      if (strong(i, k) && first[op.col[k]] != kUnassigned && op.weight[k] > best) {
        best = op.weight[k];
        agg[i] = first[op.col[k]];
      }
    }
  }

  // Pass 3: whatever remains groups with its free strong neighbors.
  for (std::size_t i = 0; i < n; ++i) {
    if (agg[i] != kUnassigned) continue;
    const auto id = static_cast<std::uint32_t>(count++);
    agg[i] = id;
    for (std::size_t k = op.row_ptr[i]; k < op.row_ptr[i + 1]; ++k) {
      if (strong(i, k) && agg[op.col[k]] == kUnassigned) agg[op.col[k]] = id;
    }
  }

  if (n > 0 && static_cast<double>(count) > 0.85 * static_cast<double>(n)) {
    std::size_t matched = 0;
    auto pairs = pairwise_matching(op, matched);
    if (matched < count) {
      count = matched;
      return pairs;
    }
  }
  return agg;
}

WeightedOperator coarsen(const WeightedOperator& op, const std::vector<std::uint32_t>& aggregate, std::size_t count) {
  struct Entry {
    std::uint32_t a, b;
    double w;
  };
  std::vector<Entry> entries;
  entries.reserve(op.col.size());
  WeightedOperator c;
  c.n = count;
  c.leak.assign(count, 0.0);
  for (std::size_t i = 0; i < op.n; ++i) {
    const auto a = aggregate[i];
    c.leak[a] += op.leak[i];
    for (std::size_t k = op.row_ptr[i]; k < op.row_ptr[i + 1]; ++k) {
      const auto b = aggregate[op.col[k]];
      if (a != b) entries.push_back({a, b, op.weight[k]});
    }
  }
  std::sort(entries.begin(), entries.end(), [](const Entry& x, const Entry& y) {
    return x.a != y.a ? x.a < y.a : x.b < y.b;
  });
  c.row_ptr.assign(count + 1, 0);
  for (std::size_t e = 0; e < entries.size();) {
    std::size_t f = e;
    double sum = 0.0;
    while (f < entries.size() && entries[f].a == entries[e].a && entries[f].b == entries[e].b) sum += entries[f++].w;
    c.col.push_back(entries[e].b);
    c.weight.push_back(sum);
    ++c.row_ptr[entries[e].a + 1];
    e = f;
  }
  for (std::size_t i = 0; i < count; ++i) c.row_ptr[i + 1] += c.row_ptr[i];
  c.finalize_diagonal();
  return c;
}

AggregationMultigrid::AggregationMultigrid(WeightedOperator fine) : AggregationMultigrid(std::move(fine), Options{}) {}

AggregationMultigrid::AggregationMultigrid(WeightedOperator fine, Options opts) : opts_(opts) {
  if (fine.diag.size() != fine.n) fine.finalize_diagonal();
  levels_.push_back({std::move(fine), {}});
  while (levels_.back().op.n > opts_.coarse_size && levels_.size() < opts_.max_levels) {
    Level& cur = levels_.back();
    std::size_t count = 0;
    auto agg = aggregate_strong(cur.op, opts_.strength, count);
    if (count >= cur.op.n) break;  // no edges left to contract
    WeightedOperator next = coarsen(cur.op, agg, count);
    cur.aggregate = std::move(agg);
    levels_.push_back({std::move(next), {}});
  }
  constexpr std::size_t kDenseCoarseLimit = 2048;
  if (levels_.back().op.n <= kDenseCoarseLimit) {
    coarse_ = DenseLaplacianFactor(levels_.back().op);
    coarse_exact_ = true;
  }
}

void AggregationMultigrid::apply(std::span<const double> r, std::span<double> z) const { cycle(0, r, z); }

void AggregationMultigrid::cycle(std::size_t k, std::span<const double> r, std::span<double> z) const {
  const WeightedOperator& a = levels_[k].op;
  const std::size_t n = a.n;

  auto sweep = [&](bool forward) {
    for (std::size_t s = 0; s < n; ++s) {
      const std::size_t i = forward ? s : n - 1 - s;
      double acc = r[i];
      for (std::size_t e = a.row_ptr[i]; e < a.row_ptr[i + 1]; ++e) acc += a.weight[e] * z[a.col[e]];
      z[i] = acc / a.diag[i];
    }
  };

  std::fill(z.begin(), z.end(), 0.0);
  if (k + 1 == levels_.size()) {
    if (coarse_exact_) {
      coarse_.solve(r, z);
    } else {
      for (std::size_t s = 0; s < 4 * opts_.smoothing_sweeps; ++s) sweep(s % 2 == 0);
    }
    return;
  }

  for (std::size_t s = 0; s < opts_.smoothing_sweeps; ++s) sweep(true);

  std::vector<double> residual(n);
  a.apply(z, residual);
  const auto& agg = levels_[k].aggregate;
  const std::size_t nc = levels_[k + 1].op.n;
  std::vector<double> rc(nc, 0.0);
  for (std::size_t i = 0; i < n; ++i) rc[agg[i]] += r[i] - residual[i];
  std::vector<double> ec(nc, 0.0);
  cycle(k + 1, rc, ec);
  for (std::size_t i = 0; i < n; ++i) z[i] += ec[agg[i]];

  for (std::size_t s = 0; s < opts_.smoothing_sweeps; ++s) sweep(false);
}

}  // namespace rwprop
