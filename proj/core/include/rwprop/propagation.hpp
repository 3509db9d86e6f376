#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "rwprop/dirichlet.hpp"
#include "rwprop/labels.hpp"
#include "rwprop/lattice.hpp"
#include "rwprop/volume.hpp"

namespace rwprop {

// What to do with roi regions that end up with no seed at all.
enum class SeedlessPolicy { Error, NearestSeed, Background };

std::string_view to_string(SeedlessPolicy policy) noexcept;
SeedlessPolicy parse_seedless_policy(std::string_view text);

struct PropagationRequest {
  ImageVolume guidance;  // edge-map intensities, expected in [0,1]
  MaskVolume roi;
  MultiLabelAnnotation annotation;
  double beta = kDefaultBeta;
  SolverConfig solver;
  SeedlessPolicy seedless_policy = SeedlessPolicy::NearestSeed;
};

struct LabelSolveStats {
  LabelId label = kBackground;
  std::size_t iterations = 0;
  double residual = 0.0;
};

struct PropagationReport {
  std::size_t roi_voxels = 0;
  std::size_t seeds = 0;               // single-labeled roi voxels, kept fixed
  std::size_t seeds_outside_roi = 0;   // dropped
  std::size_t conflicts_cleared = 0;   // multi-labeled roi voxels reset to unlabeled
  std::size_t unseeded_filled = 0;     // roi voxels whose label came from the walker
  std::size_t components = 0;
  std::size_t seedless_components = 0;
  std::size_t seedless_voxels = 0;     // handled by the seedless policy
  std::size_t renormalized_nodes = 0;
  std::vector<LabelSolveStats> solves;
};

struct PropagationResult {
  SoftLabels soft;
  LabelVolume hard;
  PropagationReport report;
};

// Conflict stripping, lattice construction over the roi, random-walker solve
// and hard labelling. Seeds outside the roi are discarded and counted.
PropagationResult propagate(const PropagationRequest& req);

// Runs propagate separately inside each hemisphere mask and stitches the
// results. Roi voxels outside both masks are treated by the seedless policy.
PropagationResult propagate_bilateral(const PropagationRequest& req,
                                      const std::pair<MaskVolume, MaskVolume>& hemispheres);

std::string report_to_json(const PropagationReport& report, const LabelSet& labels);

}  // namespace rwprop
