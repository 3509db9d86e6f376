#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "rwprop/labels.hpp"
#include "rwprop/volume.hpp"

namespace rwprop::nifti {

// Single-file NIfTI-1 subset: uncompressed, little-endian, 3D, datatypes
// uint8 / int16 / float32 / uint16, data at offset 352.

inline constexpr std::int32_t kHeaderSize = 348;
inline constexpr std::int32_t kDataOffset = 352;

enum Datatype : std::int16_t {
  kUint8 = 2,
  kInt16 = 4,
  kFloat32 = 16,
  kFloat64 = 64,
  kUint16 = 512,
};

struct Header {
  std::int32_t sizeof_hdr = kHeaderSize;
  std::array<std::int16_t, 8> dim{3, 1, 1, 1, 1, 1, 1, 1};
  std::int16_t datatype = kFloat32;
  std::int16_t bitpix = 32;
  std::array<float, 8> pixdim{1, 1, 1, 1, 0, 0, 0, 0};
  float vox_offset = static_cast<float>(kDataOffset);
  float scl_slope = 1.0f;
  float scl_inter = 0.0f;
  std::uint8_t xyzt_units = 2;  // mm
  std::int16_t qform_code = 0;
  std::int16_t sform_code = 1;
  std::array<float, 3> qoffset{0, 0, 0};
  std::array<float, 4> srow_x{1, 0, 0, 0};
  std::array<float, 4> srow_y{0, 1, 0, 0};
  std::array<float, 4> srow_z{0, 0, 1, 0};
  std::array<char, 4> magic{'n', '+', '1', '\0'};

  Dims dims() const;
  std::size_t bytes_per_voxel() const;
};

// Throws BadMagic / UnsupportedDatatype / DimMismatch when the header falls
// outside the supported subset.
void validate(const Header& h);

std::array<std::uint8_t, kHeaderSize> encode_header(const Header& h);
Header decode_header(std::span<const std::uint8_t> bytes);

Header read_header(const std::filesystem::path& path);

ImageVolume read_intensity(const std::filesystem::path& path);
ImageVolume read_probability(const std::filesystem::path& path);
LabelVolume read_labels(const std::filesystem::path& path);
MaskVolume read_mask(const std::filesystem::path& path);

void write_volume(const ImageVolume& v, const std::filesystem::path& path);
void write_volume(const LabelVolume& v, const std::filesystem::path& path);
void write_volume(const MaskVolume& v, const std::filesystem::path& path);

// One binary mask per LabelSet entry, in the same order. Masks may overlap.
MultiLabelAnnotation read_annotation(std::span<const std::filesystem::path> paths, const LabelSet& labels);

}  // namespace rwprop::nifti
