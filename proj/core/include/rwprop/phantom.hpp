#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "rwprop/labels.hpp"
#include "rwprop/volume.hpp"

namespace rwprop {

/// Synthetic test subject: an ellipsoidal roi split into nearest-center
/// (Voronoi) regions, one per blob, with piecewise-constant intensities plus
/// Gaussian noise, and an annotation corrupted by removed and doubled labels.
struct PhantomSpec {
  struct Blob {
    LabelId label = 1;
    std::string name;
    std::array<double, 3> center{};  // voxel coordinates
    double intensity = 0.5;
  };
  // Extra roi balls left entirely unlabeled, giving seedless components.
  struct Island {
    std::array<double, 3> center{};
    double radius = 1.0;
  };

  Dims dims{32, 32, 32};
  std::array<double, 3> spacing{1.0, 1.0, 1.0};
  std::array<double, 3> roi_center{15.5, 15.5, 15.5};
  std::array<double, 3> roi_radii{12.0, 12.0, 12.0};
  std::vector<Blob> blobs;
  std::vector<Island> islands;
  double background_intensity = 0.0;
  double noise_sigma = 0.01;
  double unlabeled_fraction = 0.0;  // of roi voxels
  double conflict_fraction = 0.0;   // of the voxels that stay labeled
  bool retain_blob_centers = false; // keep the voxel at each center single-labeled
  std::uint64_t seed = 0;

  void validate() const;
  LabelSet label_set() const;
};

struct Phantom {
  LabelSet labels;
  ImageVolume guidance;
  MaskVolume roi;
  MultiLabelAnnotation annotation;
  LabelVolume truth;
};

Phantom make_phantom(const PhantomSpec& spec);

// JSON encoding of PhantomSpec; unknown keys are rejected with BadSpec.
PhantomSpec parse_phantom_spec(std::string_view json_text);
std::string phantom_spec_to_json(const PhantomSpec& spec);

/// 13 thalamic-nucleus blobs in a 64x96x64 grid with contrast between every
/// pair of regions, sigma 0.01.
PhantomSpec thalamus_phantom_spec(double unlabeled_fraction = 0.3, double conflict_fraction = 0.2,
                                  std::uint64_t seed = 2023);

}  // namespace rwprop
