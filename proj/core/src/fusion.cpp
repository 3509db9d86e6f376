#include "rwprop/fusion.hpp"

#include <algorithm>

namespace rwprop {

LabelVolume majority_vote(const std::vector<LabelVolume>& maps, const MaskVolume& roi) {
  if (maps.size() < 2) {
    throw Error(ErrorCode::TooFewMaps, "majority vote needs at least 2 maps, got " + std::to_string(maps.size()));
  }
  for (const auto& m : maps) require_same_dims(m, roi, "majority_vote");

  LabelVolume out = make_labels(roi.grid());
  std::vector<LabelId> votes(maps.size());
  for (std::size_t v = 0; v < roi.size(); ++v) {
    if (!roi[v]) continue;
    for (std::size_t k = 0; k < maps.size(); ++k) votes[k] = maps[k][v];
    std::sort(votes.begin(), votes.end());
    // Runs in ascending id order; a strictly longer run is required to
    // displace an earlier (smaller) label.
    LabelId best = votes[0];
    std::size_t best_count = 0;
    for (std::size_t i = 0; i < votes.size();) {
      std::size_t j = i;
      while (j < votes.size() && votes[j] == votes[i]) ++j;
      if (j - i > best_count) {
        best_count = j - i;
        best = votes[i];
      }
      i = j;
    }
    out[v] = best;
  }
  return out;
}

}  // namespace rwprop
