#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "rwprop/error.hpp"

namespace rwprop {

using LabelId = std::uint16_t;
inline constexpr LabelId kBackground = 0;

struct Dims {
  std::size_t x = 1;
  std::size_t y = 1;
  std::size_t z = 1;

  std::size_t count() const noexcept { return x * y * z; }
  friend bool operator==(const Dims&, const Dims&) = default;
};

std::string to_string(const Dims& d);

/// Voxel lattice geometry shared by every volume: extent, voxel size (mm) and
/// the world position of voxel (0,0,0). Linear indices are x-fastest.
struct Grid {
  Dims dims;
  std::array<double, 3> spacing{1.0, 1.0, 1.0};
  std::array<double, 3> origin{0.0, 0.0, 0.0};

  std::size_t voxel_count() const noexcept { return dims.count(); }

  std::size_t index(std::size_t x, std::size_t y, std::size_t z) const noexcept {
    return x + dims.x * (y + dims.y * z);
  }

  std::array<std::size_t, 3> coords(std::size_t index) const noexcept {
    const std::size_t x = index % dims.x;
    const std::size_t rest = index / dims.x;
    return {x, rest % dims.y, rest / dims.y};
  }

  // Throws InvalidArgument when dims are zero or spacing is not positive.
  void validate() const;

  friend bool operator==(const Grid&, const Grid&) = default;
};

enum class ElementKind { Intensity, Label, Mask, Probability };

std::string_view to_string(ElementKind kind) noexcept;

template <typename T>
class Volume {
 public:
  using value_type = T;

  Volume() = default;

  Volume(Grid grid, ElementKind kind, T fill = T{})
      : grid_(std::move(grid)), kind_(kind), data_(grid_.voxel_count(), fill) {
    check();
  }

  Volume(Grid grid, ElementKind kind, std::vector<T> data)
      : grid_(std::move(grid)), kind_(kind), data_(std::move(data)) {
    check();
  }

  const Grid& grid() const noexcept { return grid_; }
  const Dims& dims() const noexcept { return grid_.dims; }
  ElementKind kind() const noexcept { return kind_; }
  std::size_t size() const noexcept { return data_.size(); }

  std::span<const T> data() const noexcept { return data_; }
  std::span<T> data() noexcept { return data_; }

  const T& operator[](std::size_t i) const noexcept { return data_[i]; }
  T& operator[](std::size_t i) noexcept { return data_[i]; }

  const T& at(std::size_t x, std::size_t y, std::size_t z) const noexcept {
    return data_[grid_.index(x, y, z)];
  }
  T& at(std::size_t x, std::size_t y, std::size_t z) noexcept { return data_[grid_.index(x, y, z)]; }

  void set_grid_geometry(const std::array<double, 3>& spacing, const std::array<double, 3>& origin) {
    Grid g = grid_;
    g.spacing = spacing;
    g.origin = origin;
    g.validate();
    grid_ = g;
  }

  friend bool operator==(const Volume&, const Volume&) = default;

 private:
  void check() const {
    grid_.validate();
    if (data_.size() != grid_.voxel_count()) {
      throw Error(ErrorCode::DimMismatch, "data length " + std::to_string(data_.size()) +
                                              " does not match dims " + to_string(grid_.dims));
    }
    if constexpr (std::is_floating_point_v<T>) {
      if (kind_ != ElementKind::Intensity && kind_ != ElementKind::Probability) {
        throw Error(ErrorCode::InvalidArgument, "floating-point volume must be intensity or probability");
      }
    } else if constexpr (std::is_same_v<T, LabelId>) {
      if (kind_ != ElementKind::Label) throw Error(ErrorCode::InvalidArgument, "uint16 volume must be a label volume");
    } else if constexpr (std::is_same_v<T, std::uint8_t>) {
      if (kind_ != ElementKind::Mask) throw Error(ErrorCode::InvalidArgument, "uint8 volume must be a mask");
      for (auto v : data_) {
        if (v > 1) throw Error(ErrorCode::InvalidArgument, "mask volume holds a value other than 0/1");
      }
    }
  }

  Grid grid_;
  ElementKind kind_ = ElementKind::Intensity;
  std::vector<T> data_;
};

using ImageVolume = Volume<double>;
using LabelVolume = Volume<LabelId>;
using MaskVolume = Volume<std::uint8_t>;

inline ImageVolume make_image(Grid grid, double fill = 0.0) {
  return ImageVolume(std::move(grid), ElementKind::Intensity, fill);
}
inline LabelVolume make_labels(Grid grid, LabelId fill = kBackground) {
  return LabelVolume(std::move(grid), ElementKind::Label, fill);
}
inline MaskVolume make_mask(Grid grid, bool fill = false) {
  return MaskVolume(std::move(grid), ElementKind::Mask, static_cast<std::uint8_t>(fill ? 1 : 0));
}

template <typename A, typename B>
void require_same_dims(const Volume<A>& a, const Volume<B>& b, std::string_view what) {
  if (a.dims() != b.dims()) {
    throw Error(ErrorCode::DimMismatch,
                std::string(what) + ": " + to_string(a.dims()) + " vs " + to_string(b.dims()));
  }
}

std::size_t count_nonzero(const MaskVolume& mask);

}  // namespace rwprop
