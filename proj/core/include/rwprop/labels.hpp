#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "rwprop/volume.hpp"

namespace rwprop {

/// Ordered set of foreground labels. Ids are unique, strictly positive and
/// ascending; 0 is reserved for background and is never a member.
class LabelSet {
 public:
  struct Entry {
    LabelId id = 0;
    std::string name;
    friend bool operator==(const Entry&, const Entry&) = default;
  };

  LabelSet() = default;
  explicit LabelSet(std::vector<Entry> entries);

  std::size_t size() const noexcept { return entries_.size(); }
  const std::vector<Entry>& entries() const noexcept { return entries_; }
  const Entry& operator[](std::size_t i) const noexcept { return entries_[i]; }
  std::vector<LabelId> ids() const;

  std::optional<std::size_t> index_of(LabelId id) const noexcept;
  bool contains(LabelId id) const noexcept { return index_of(id).has_value(); }
  const std::string& name_of(LabelId id) const;

  friend bool operator==(const LabelSet&, const LabelSet&) = default;

 private:
  std::vector<Entry> entries_;
};

// Line-oriented "id<TAB>name" text; '#' starts a comment, blank lines ignored.
LabelSet parse_label_set(std::istream& in);
LabelSet read_label_set(const std::filesystem::path& path);
void write_label_set(std::ostream& out, const LabelSet& labels);

/// Per-voxel set of label ids, stored as one binary mask per LabelSet entry.
/// A voxel may carry no label, one label, or several (a conflict).
class MultiLabelAnnotation {
 public:
  MultiLabelAnnotation() = default;
  MultiLabelAnnotation(Grid grid, LabelSet labels);
  MultiLabelAnnotation(LabelSet labels, std::vector<MaskVolume> masks);

  const Grid& grid() const noexcept { return grid_; }
  const Dims& dims() const noexcept { return grid_.dims; }
  const LabelSet& labels() const noexcept { return labels_; }
  std::size_t voxel_count() const noexcept { return grid_.voxel_count(); }

  // k is the position of the label in the LabelSet, not its id.
  bool has(std::size_t voxel, std::size_t k) const noexcept { return masks_[k][voxel] != 0; }
  void set(std::size_t voxel, std::size_t k, bool on = true) noexcept { masks_[k][voxel] = on ? 1 : 0; }
  void add_label(std::size_t voxel, LabelId id);

  std::size_t count(std::size_t voxel) const noexcept;
  std::vector<LabelId> labels_at(std::size_t voxel) const;

  const MaskVolume& mask(std::size_t k) const noexcept { return masks_[k]; }
  const std::vector<MaskVolume>& masks() const noexcept { return masks_; }

  friend bool operator==(const MultiLabelAnnotation&, const MultiLabelAnnotation&) = default;

 private:
  Grid grid_;
  LabelSet labels_;
  std::vector<MaskVolume> masks_;
};

// Builds an annotation whose voxels each carry exactly the label in `labels`
// (background voxels carry none).
MultiLabelAnnotation annotation_from_labels(const LabelVolume& labels, const LabelSet& set);

/// Fractional per-voxel label memberships, voxel-major (m values per voxel).
struct MembershipField {
  Grid grid;
  std::vector<LabelId> ids;
  std::vector<double> values;

  std::size_t label_count() const noexcept { return ids.size(); }
  double at(std::size_t voxel, std::size_t k) const noexcept { return values[voxel * ids.size() + k]; }
};

/// One probability volume per label, in LabelSet order.
struct SoftLabels {
  std::vector<LabelId> ids;
  std::vector<ImageVolume> maps;
};

}  // namespace rwprop
