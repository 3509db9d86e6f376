#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "rwprop/labels.hpp"
#include "rwprop/volume.hpp"

namespace rwprop {

// 2|P∩T| / (|P|+|T|) over eval_mask voxels; 1.0 when both sets are empty.
double dice(const LabelVolume& pred, const LabelVolume& target, LabelId label, const MaskVolume& eval_mask);

// roi minus voxels carrying two or more annotation labels.
MaskVolume build_eval_mask(const MultiLabelAnnotation& annotation, const MaskVolume& roi);

struct ClassDice {
  LabelId label = kBackground;
  std::string name;
  double dice = 1.0;
  std::size_t target_volume = 0;  // voxels, within the eval mask
  std::size_t pred_volume = 0;
};

/// Per-class Dice plus their mean weighted by target class volume.
struct DiceReport {
  std::vector<ClassDice> per_class;
  double overall = 1.0;
  std::size_t excluded_voxels = 0;  // roi voxels left out of the evaluation
};

// `roi` is only used to count excluded voxels; pass the eval mask itself when
// there is no separate roi.
DiceReport dice_report(const LabelVolume& pred, const LabelVolume& target, const LabelSet& labels,
                       const MaskVolume& eval_mask, const MaskVolume& roi);
DiceReport dice_report(const LabelVolume& pred, const LabelVolume& target, const LabelSet& labels,
                       const MaskVolume& eval_mask);

std::string format_dice_table(const DiceReport& report);
std::string dice_report_to_json(const DiceReport& report);

}  // namespace rwprop
