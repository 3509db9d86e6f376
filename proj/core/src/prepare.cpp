#include "rwprop/prepare.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace rwprop {

namespace {

ImageVolume normalize_with(const ImageVolume& v, double lo, double hi) {
  if (!(hi > lo)) throw Error(ErrorCode::ConstantVolume, "cannot normalize a volume with max == min");
  const double scale = 1.0 / (hi - lo);
  ImageVolume out = v;
  for (auto& x : out.data()) x = (x - lo) * scale;
  return out;
}

}  // namespace

ImageVolume min_max_normalize(const ImageVolume& v) {
  auto [lo, hi] = std::minmax_element(v.data().begin(), v.data().end());
  return normalize_with(v, *lo, *hi);
}

ImageVolume min_max_normalize(const ImageVolume& v, const MaskVolume& roi) {
  require_same_dims(v, roi, "min_max_normalize roi");
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!roi[i]) continue;
    lo = std::min(lo, v[i]);
    hi = std::max(hi, v[i]);
  }
  return normalize_with(v, lo, hi);
}

std::array<std::size_t, 3> crop_window_start(const Dims& source, const Dims& target) {
  if (target.x == 0 || target.y == 0 || target.z == 0) {
    throw Error(ErrorCode::InvalidArgument, "crop target must be >= 1 on every axis");
  }
  if (target.x > source.x || target.y > source.y || target.z > source.z) {
    throw Error(ErrorCode::TargetTooLarge, "crop target " + to_string(target) + " exceeds " + to_string(source));
  }
  return {(source.x - target.x) / 2, (source.y - target.y) / 2, (source.z - target.z) / 2};
}

SeedSplit strip_conflicts(const MultiLabelAnnotation& annotation) {
  SeedSplit out{make_labels(annotation.grid()), make_mask(annotation.grid())};
  const auto& labels = annotation.labels();
  for (std::size_t v = 0; v < annotation.voxel_count(); ++v) {
    std::size_t n = 0;
    std::size_t last = 0;
    for (std::size_t k = 0; k < labels.size(); ++k) {
      if (annotation.has(v, k)) {
        ++n;
        last = k;
      }
    }
    if (n == 1) out.seeds[v] = labels[last].id;
    if (n >= 2) out.conflicts[v] = 1;
  }
  return out;
}

MembershipField to_membership(const MultiLabelAnnotation& annotation) {
  const std::size_t m = annotation.labels().size();
  MembershipField field{annotation.grid(), annotation.labels().ids(),
                        std::vector<double>(annotation.voxel_count() * m, 0.0)};
  for (std::size_t v = 0; v < annotation.voxel_count(); ++v) {
    const std::size_t n = annotation.count(v);
    if (n == 0) continue;
    const double share = 1.0 / static_cast<double>(n);
    for (std::size_t k = 0; k < m; ++k) {
      if (annotation.has(v, k)) field.values[v * m + k] = share;
    }
  }
  return field;
}

LabelVolume argmax_labels(const SoftLabels& soft, const MaskVolume& roi) {
  if (soft.maps.size() != soft.ids.size() || soft.maps.empty()) {
    throw Error(ErrorCode::InvalidArgument, "soft labels need one map per label id");
  }
  for (const auto& map : soft.maps) require_same_dims(map, roi, "argmax_labels");

  LabelVolume out = make_labels(roi.grid());
  for (std::size_t v = 0; v < roi.size(); ++v) {
    if (!roi[v]) continue;
    std::size_t best = 0;
    bool any_mass = soft.maps[0][v] != 0.0;
    for (std::size_t k = 1; k < soft.maps.size(); ++k) {
      const double p = soft.maps[k][v];
      if (p != 0.0) any_mass = true;
      const bool better = p > soft.maps[best][v] || (p == soft.maps[best][v] && soft.ids[k] < soft.ids[best]);
      if (better) best = k;
    }
    if (any_mass) out[v] = soft.ids[best];
  }
  return out;
}

}  // namespace rwprop
