#include "rwprop/labels.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>

namespace rwprop {

LabelSet::LabelSet(std::vector<Entry> entries) : entries_(std::move(entries)) {
  if (entries_.empty()) throw Error(ErrorCode::BadLabelSet, "label set must contain at least one label");
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (entries_[i].id == kBackground) throw Error(ErrorCode::BadLabelSet, "label id 0 is reserved for background");
    if (i > 0 && entries_[i].id <= entries_[i - 1].id) {
      throw Error(ErrorCode::BadLabelSet, "label ids must be unique and ascending (id " +
                                               std::to_string(entries_[i].id) + ")");
    }
  }
}

std::vector<LabelId> LabelSet::ids() const {
  std::vector<LabelId> out;
  out.reserve(entries_.size());
  for (const auto& e : entries_) out.push_back(e.id);
  return out;
}

std::optional<std::size_t> LabelSet::index_of(LabelId id) const noexcept {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), id,
                             [](const Entry& e, LabelId v) { return e.id < v; });
  if (it == entries_.end() || it->id != id) return std::nullopt;
  return static_cast<std::size_t>(it - entries_.begin());
}

const std::string& LabelSet::name_of(LabelId id) const {
  auto k = index_of(id);
  if (!k) throw Error(ErrorCode::BadLabelSet, "label id " + std::to_string(id) + " not in label set");
  return entries_[*k].name;
}

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

}  // namespace

LabelSet parse_label_set(std::istream& in) {
  std::vector<LabelSet::Entry> entries;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = line;
    if (auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    view = trim(view);
    if (view.empty()) continue;

    const auto sep = view.find_first_of(" \t");
    const std::string_view id_text = view.substr(0, sep);
    const std::string_view name = sep == std::string_view::npos ? std::string_view{} : trim(view.substr(sep));

    unsigned value = 0;
    auto [ptr, ec] = std::from_chars(id_text.data(), id_text.data() + id_text.size(), value);
    if (ec != std::errc{} || ptr != id_text.data() + id_text.size() || value > 0xFFFF) {
      throw Error(ErrorCode::BadLabelSet, "line " + std::to_string(line_no) + ": bad label id '" +
                                               std::string(id_text) + "'");
    }
    if (name.empty()) throw Error(ErrorCode::BadLabelSet, "line " + std::to_string(line_no) + ": missing name");
    entries.push_back({static_cast<LabelId>(value), std::string(name)});
  }
  return LabelSet(std::move(entries));
}

LabelSet read_label_set(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open label set file " + path.string());
  return parse_label_set(in);
}

void write_label_set(std::ostream& out, const LabelSet& labels) {
  for (const auto& e : labels.entries()) out << e.id << '\t' << e.name << '\n';
}

MultiLabelAnnotation::MultiLabelAnnotation(Grid grid, LabelSet labels)
    : grid_(std::move(grid)), labels_(std::move(labels)) {
  grid_.validate();
  masks_.assign(labels_.size(), make_mask(grid_));
}

MultiLabelAnnotation::MultiLabelAnnotation(LabelSet labels, std::vector<MaskVolume> masks)
    : labels_(std::move(labels)), masks_(std::move(masks)) {
  if (masks_.size() != labels_.size()) {
    throw Error(ErrorCode::PathCountMismatch, std::to_string(masks_.size()) + " masks for " +
                                                   std::to_string(labels_.size()) + " labels");
  }
  grid_ = masks_.front().grid();
  for (const auto& m : masks_) require_same_dims(masks_.front(), m, "annotation masks");
}

void MultiLabelAnnotation::add_label(std::size_t voxel, LabelId id) {
  auto k = labels_.index_of(id);
  if (!k) throw Error(ErrorCode::BadLabelSet, "label id " + std::to_string(id) + " not in label set");
  masks_[*k][voxel] = 1;
}

std::size_t MultiLabelAnnotation::count(std::size_t voxel) const noexcept {
  std::size_t n = 0;
  for (const auto& m : masks_) n += m[voxel];
  return n;
}

std::vector<LabelId> MultiLabelAnnotation::labels_at(std::size_t voxel) const {
  std::vector<LabelId> out;
  for (std::size_t k = 0; k < masks_.size(); ++k) {
    if (masks_[k][voxel]) out.push_back(labels_[k].id);
  }
  return out;
}

MultiLabelAnnotation annotation_from_labels(const LabelVolume& labels, const LabelSet& set) {
  MultiLabelAnnotation ann(labels.grid(), set);
  for (std::size_t v = 0; v < labels.size(); ++v) {
    if (labels[v] != kBackground) ann.add_label(v, labels[v]);
  }
  return ann;
}

}  // namespace rwprop
