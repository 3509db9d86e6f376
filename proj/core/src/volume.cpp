#include "rwprop/volume.hpp"

#include <algorithm>
#include <cmath>

namespace rwprop {

std::string to_string(const Dims& d) {
  return "(" + std::to_string(d.x) + "," + std::to_string(d.y) + "," + std::to_string(d.z) + ")";
}

void Grid::validate() const {
  if (dims.x == 0 || dims.y == 0 || dims.z == 0) {
    throw Error(ErrorCode::InvalidArgument, "volume dims must all be >= 1, got " + to_string(dims));
  }
  for (double s : spacing) {
    if (!(s > 0.0) || !std::isfinite(s)) throw Error(ErrorCode::InvalidArgument, "voxel spacing must be positive");
  }
}

std::string_view to_string(ElementKind kind) noexcept {
  switch (kind) {
    case ElementKind::Intensity: return "intensity";
    case ElementKind::Label: return "label";
    case ElementKind::Mask: return "mask";
    case ElementKind::Probability: return "probability";
  }
  return "unknown";
}

std::size_t count_nonzero(const MaskVolume& mask) {
  return static_cast<std::size_t>(std::count(mask.data().begin(), mask.data().end(), std::uint8_t{1}));
}

}  // namespace rwprop
