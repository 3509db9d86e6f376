#pragma once

#include <vector>

#include "rwprop/volume.hpp"

namespace rwprop {

// Per-voxel majority vote over two or more label maps inside the roi.
// Background is a valid vote; ties go to the smallest label id.
LabelVolume majority_vote(const std::vector<LabelVolume>& maps, const MaskVolume& roi);

}  // namespace rwprop
