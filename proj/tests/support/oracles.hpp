#pragma once

// Reference computations used only by the tests. They work from the lattice
// edges directly and share no code with the solver.

#include <cmath>
#include <cstddef>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

#include "rwprop/labels.hpp"
#include "rwprop/lattice.hpp"

namespace rwprop::testing {

// Dense Gaussian elimination with partial pivoting in long double on the
// unseeded block of the full graph Laplacian. Returns node-major
// probabilities for every label in `labels` (seeds one-hot).
inline std::vector<double> gaussian_oracle(const LatticeGraph& g, const std::vector<LabelId>& seeds,
                                           const LabelSet& labels) {
  const std::size_t n = g.node_count();
  const std::size_t m = labels.size();
  std::vector<long> row(n, -1);
  std::size_t u = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (seeds[i] == kBackground) row[i] = static_cast<long>(u++);
  }
  std::vector<long double> a(u * u, 0.0L);
  std::vector<long double> b(u * m, 0.0L);
  for (const Edge& e : g.edges()) {
    const long ri = row[e.i], rj = row[e.j];
    const long double w = e.weight;
    if (ri >= 0) a[ri * u + ri] += w;
    if (rj >= 0) a[rj * u + rj] += w;
    if (ri >= 0 && rj >= 0) {
      a[ri * u + rj] -= w;
      a[rj * u + ri] -= w;
    } else if (ri >= 0) {
      b[ri * m + *labels.index_of(seeds[e.j])] += w;
    } else if (rj >= 0) {
      b[rj * m + *labels.index_of(seeds[e.i])] += w;
    }
  }
  for (std::size_t k = 0; k < u; ++k) {
    std::size_t p = k;
    for (std::size_t r = k + 1; r < u; ++r) {
      if (std::fabs(a[r * u + k]) > std::fabs(a[p * u + k])) p = r;
    }
    if (a[p * u + k] == 0.0L) throw std::runtime_error("singular oracle system");
    if (p != k) {
      for (std::size_t c = 0; c < u; ++c) std::swap(a[k * u + c], a[p * u + c]);
      for (std::size_t c = 0; c < m; ++c) std::swap(b[k * m + c], b[p * m + c]);
    }
    for (std::size_t r = k + 1; r < u; ++r) {
      const long double f = a[r * u + k] / a[k * u + k];
      if (f == 0.0L) continue;
      for (std::size_t c = k; c < u; ++c) a[r * u + c] -= f * a[k * u + c];
      for (std::size_t c = 0; c < m; ++c) b[r * m + c] -= f * b[k * m + c];
    }
  }
  std::vector<long double> x(u * m, 0.0L);
  for (std::size_t k = u; k-- > 0;) {
    for (std::size_t c = 0; c < m; ++c) {
      long double s = b[k * m + c];
      for (std::size_t j = k + 1; j < u; ++j) s -= a[k * u + j] * x[j * m + c];
      x[k * m + c] = s / a[k * u + k];
    }
  }
  std::vector<double> out(n * m, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (row[i] < 0) {
      out[i * m + *labels.index_of(seeds[i])] = 1.0;
    } else {
      for (std::size_t c = 0; c < m; ++c) out[i * m + c] = static_cast<double>(x[row[i] * m + c]);
    }
  }
  return out;
}

// Empirical absorption frequencies: from each unseeded node, `walks` random
// walks stepping to neighbor j with probability w_ij / d_i until a seed is
// hit. Returns node-major frequencies (seeds one-hot).
inline std::vector<double> monte_carlo_oracle(const LatticeGraph& g, const std::vector<LabelId>& seeds,
                                              const LabelSet& labels, std::size_t walks, std::uint64_t rng_seed) {
  const std::size_t n = g.node_count();
  const std::size_t m = labels.size();
  // Flat cumulative weights per node; absorbing nodes are marked by label index.
  const auto& off = g.offsets();
  std::vector<double> cum(g.adjacency().size());
  std::vector<std::uint32_t> to(g.adjacency().size());
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t k = off[i]; k < off[i + 1]; ++k) {
      s += g.adjacency()[k].weight;
      cum[k] = s;
      to[k] = g.adjacency()[k].node;
    }
  }
  std::vector<int> absorb(n, -1);
  for (std::size_t i = 0; i < n; ++i) {
    if (seeds[i] != kBackground) absorb[i] = static_cast<int>(*labels.index_of(seeds[i]));
  }
  std::mt19937_64 rng(rng_seed);
  std::vector<double> out(n * m, 0.0);
  for (std::size_t start = 0; start < n; ++start) {
    if (absorb[start] >= 0) {
      out[start * m + absorb[start]] = 1.0;
      continue;
    }
    std::vector<std::size_t> hits(m, 0);
    for (std::size_t w = 0; w < walks; ++w) {
      std::size_t at = start;
      while (absorb[at] < 0) {
        const std::size_t lo = off[at], hi = off[at + 1];
        const double r = static_cast<double>(rng() >> 11) * 0x1.0p-53 * cum[hi - 1];
        std::size_t k = lo;
        while (k + 1 < hi && cum[k] <= r) ++k;
        at = to[k];
      }
      ++hits[absorb[at]];
    }
    for (std::size_t c = 0; c < m; ++c) out[start * m + c] = static_cast<double>(hits[c]) / walks;
  }
  return out;
}

// Largest deviation of an unseeded node's value from the weighted mean of its
// neighbors, for label column k of a node-major field.
inline double mean_value_defect(const LatticeGraph& g, const std::vector<LabelId>& seeds,
                                const std::vector<double>& field, std::size_t m, std::size_t k) {
  double worst = 0.0;
  for (std::size_t i = 0; i < g.node_count(); ++i) {
    if (seeds[i] != kBackground) continue;
    double s = 0.0, d = 0.0;
    for (const auto& nb : g.neighbors(i)) {
      s += nb.weight * field[nb.node * m + k];
      d += nb.weight;
    }
    worst = std::max(worst, std::fabs(field[i * m + k] - s / d));
  }
  return worst;
}

}  // namespace rwprop::testing
