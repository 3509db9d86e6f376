#include "rwprop/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace rwprop {

double edge_weight(double a, double b, double beta) {
  if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(beta)) {
    throw Error(ErrorCode::NonFiniteInput, "edge weight inputs must be finite");
  }
  if (beta < 0.0) throw Error(ErrorCode::InvalidArgument, "beta must be nonnegative");
  const double d = a - b;
  return std::max(std::exp(-beta * d * d), kWeightFloor);
}

double LatticeGraph::degree(std::size_t node) const noexcept {
  double sum = 0.0;
  for (const auto& n : neighbors(node)) sum += n.weight;
  return sum;
}

LatticeGraph build_lattice(const ImageVolume& guidance, const MaskVolume& roi, double beta) {
  require_same_dims(guidance, roi, "build_lattice guidance/roi");
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw Error(ErrorCode::InvalidArgument, "beta must be finite and >= 0");

  LatticeGraph g;
  g.grid_ = roi.grid();
  g.beta_ = beta;
  g.voxel_node_.assign(roi.size(), LatticeGraph::kNoNode);
  for (std::size_t v = 0; v < roi.size(); ++v) {
    if (roi[v]) {
      g.voxel_node_[v] = static_cast<std::int64_t>(g.node_voxel_.size());
      g.node_voxel_.push_back(v);
    }
  }
  if (g.node_voxel_.empty()) throw Error(ErrorCode::EmptyRoi, "roi contains no voxels");
  if (g.node_voxel_.size() > std::numeric_limits<std::uint32_t>::max()) {
    throw Error(ErrorCode::TooLarge, "roi has too many voxels for 32-bit node ids");
  }

  const Dims& d = roi.dims();
  const std::size_t stride[3] = {1, d.x, d.x * d.y};
  std::vector<std::size_t> degree(g.node_voxel_.size(), 0);
  for (std::size_t n = 0; n < g.node_voxel_.size(); ++n) {
    const std::size_t v = g.node_voxel_[n];
    const auto c = g.grid_.coords(v);
    const std::size_t extent[3] = {d.x, d.y, d.z};
    for (int a = 0; a < 3; ++a) {
      if (c[a] + 1 >= extent[a]) continue;
      const std::int64_t m = g.voxel_node_[v + stride[a]];
      if (m == LatticeGraph::kNoNode) continue;
      const double w = edge_weight(guidance[v], guidance[v + stride[a]], beta);
      g.edges_.push_back({static_cast<std::uint32_t>(n), static_cast<std::uint32_t>(m), w});
      ++degree[n];
      ++degree[static_cast<std::size_t>(m)];
    }
  }

  g.offsets_.assign(g.node_voxel_.size() + 1, 0);
  for (std::size_t n = 0; n < degree.size(); ++n) g.offsets_[n + 1] = g.offsets_[n] + degree[n];
  g.adjacency_.resize(g.offsets_.back());
  std::vector<std::size_t> cursor(g.offsets_.begin(), g.offsets_.end() - 1);
  for (const auto& e : g.edges_) {
    g.adjacency_[cursor[e.i]++] = {e.j, e.weight};
  }
  for (const auto& e : g.edges_) {
    g.adjacency_[cursor[e.j]++] = {e.i, e.weight};
  }
  for (std::size_t n = 0; n < degree.size(); ++n) {
    auto first = g.adjacency_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[n]);
    auto last = g.adjacency_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[n + 1]);
    std::sort(first, last, [](const auto& a, const auto& b) { return a.node < b.node; });
  }
  return g;
}

std::vector<std::size_t> Components::sizes() const {
  std::vector<std::size_t> out(count, 0);
  for (auto c : id) ++out[c];
  return out;
}

Components connected_components(const LatticeGraph& graph) {
  constexpr auto kUnset = std::numeric_limits<std::uint32_t>::max();
  Components comp;
  comp.id.assign(graph.node_count(), kUnset);
  std::vector<std::uint32_t> stack;
  for (std::size_t start = 0; start < graph.node_count(); ++start) {
    if (comp.id[start] != kUnset) continue;
    const auto label = static_cast<std::uint32_t>(comp.count++);
    comp.id[start] = label;
    stack.push_back(static_cast<std::uint32_t>(start));
    while (!stack.empty()) {
      const auto n = stack.back();
      stack.pop_back();
      for (const auto& nb : graph.neighbors(n)) {
        if (comp.id[nb.node] == kUnset) {
          comp.id[nb.node] = label;
          stack.push_back(nb.node);
        }
      }
    }
  }
  return comp;
}

}  // namespace rwprop
