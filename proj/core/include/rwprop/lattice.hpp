#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "rwprop/volume.hpp"

namespace rwprop {

inline constexpr double kWeightFloor = 1e-10;
inline constexpr double kDefaultBeta = 10000.0;

/// Gaussian intensity affinity exp(-beta (a - b)^2), floored at kWeightFloor.
double edge_weight(double a, double b, double beta);

struct Edge {
  std::uint32_t i = 0;  // i < j
  std::uint32_t j = 0;
  double weight = 0.0;
};

/// Undirected 6-connected graph over the voxels of a roi. Node ids are dense
/// and follow x-fastest voxel order; each neighbor pair appears once.
class LatticeGraph {
 public:
  static constexpr std::int64_t kNoNode = -1;

  LatticeGraph() = default;

  const Grid& grid() const noexcept { return grid_; }
  std::size_t node_count() const noexcept { return node_voxel_.size(); }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  double beta() const noexcept { return beta_; }

  const std::vector<Edge>& edges() const noexcept { return edges_; }

  std::int64_t node_of(std::size_t voxel) const noexcept { return voxel_node_[voxel]; }
  std::size_t voxel_of(std::size_t node) const noexcept { return node_voxel_[node]; }

  // CSR adjacency: neighbors of node n are adjacency()[offsets()[n] .. offsets()[n+1]).
  struct Neighbor {
    std::uint32_t node;
    double weight;
  };
  const std::vector<std::size_t>& offsets() const noexcept { return offsets_; }
  const std::vector<Neighbor>& adjacency() const noexcept { return adjacency_; }
  std::span<const Neighbor> neighbors(std::size_t node) const noexcept {
    return {adjacency_.data() + offsets_[node], adjacency_.data() + offsets_[node + 1]};
  }
  double degree(std::size_t node) const noexcept;

  friend LatticeGraph build_lattice(const ImageVolume& guidance, const MaskVolume& roi, double beta);

 private:
  Grid grid_;
  double beta_ = 0.0;
  std::vector<std::int64_t> voxel_node_;
  std::vector<std::size_t> node_voxel_;
  std::vector<Edge> edges_;
  std::vector<std::size_t> offsets_;
  std::vector<Neighbor> adjacency_;
};

LatticeGraph build_lattice(const ImageVolume& guidance, const MaskVolume& roi, double beta);

/// Component id per node. Ids are numbered in order of each component's
/// smallest node id.
struct Components {
  std::vector<std::uint32_t> id;
  std::size_t count = 0;

  std::vector<std::size_t> sizes() const;
};

Components connected_components(const LatticeGraph& graph);

}  // namespace rwprop
