#pragma once

#include <array>
#include <cstddef>

#include "rwprop/labels.hpp"
#include "rwprop/volume.hpp"

namespace rwprop {

// Affine map sending the minimum to 0 and the maximum to 1. Statistics come
// from the roi (or all voxels); every voxel goes through the same map, so
// values outside the roi may leave [0,1].
ImageVolume min_max_normalize(const ImageVolume& v);
ImageVolume min_max_normalize(const ImageVolume& v, const MaskVolume& roi);

/// Start index per axis of a centered crop. Odd remainders drop the extra
/// voxel on the high-index side.
std::array<std::size_t, 3> crop_window_start(const Dims& source, const Dims& target);

template <typename T>
Volume<T> center_crop(const Volume<T>& v, const Dims& target) {
  const auto start = crop_window_start(v.dims(), target);
  Grid g = v.grid();
  g.dims = target;
  for (int a = 0; a < 3; ++a) g.origin[a] += static_cast<double>(start[a]) * g.spacing[a];

  std::vector<T> out;
  out.reserve(target.count());
  for (std::size_t z = 0; z < target.z; ++z) {
    for (std::size_t y = 0; y < target.y; ++y) {
      for (std::size_t x = 0; x < target.x; ++x) out.push_back(v.at(x + start[0], y + start[1], z + start[2]));
    }
  }
  return Volume<T>(std::move(g), v.kind(), std::move(out));
}

struct SeedSplit {
  LabelVolume seeds;       // the label of singly-labeled voxels, background elsewhere
  MaskVolume conflicts;    // 1 where two or more labels overlap
};

SeedSplit strip_conflicts(const MultiLabelAnnotation& annotation);

// A voxel with n >= 1 labels gets 1/n on each; unlabeled voxels get zeros.
MembershipField to_membership(const MultiLabelAnnotation& annotation);

// Hard labels from per-label probabilities. Ties go to the smallest id; roi
// voxels with no probability mass at all, and voxels outside the roi, become
// background.
LabelVolume argmax_labels(const SoftLabels& soft, const MaskVolume& roi);

}  // namespace rwprop
