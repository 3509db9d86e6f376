#include "rwprop/metrics.hpp"

#include <cstdio>
#include <sstream>

#include <json.hpp>

namespace rwprop {

namespace {

struct Overlap {
  std::size_t pred = 0;
  std::size_t target = 0;
  std::size_t both = 0;

  double dice() const {
    if (pred + target == 0) return 1.0;
    return 2.0 * static_cast<double>(both) / static_cast<double>(pred + target);
  }
};

Overlap count_overlap(const LabelVolume& pred, const LabelVolume& target, LabelId label, const MaskVolume& mask) {
  Overlap o;
  for (std::size_t v = 0; v < mask.size(); ++v) {
    if (!mask[v]) continue;
    const bool p = pred[v] == label;
    const bool t = target[v] == label;
    o.pred += p;
    o.target += t;
    o.both += p && t;
  }
  return o;
}

}  // namespace

double dice(const LabelVolume& pred, const LabelVolume& target, LabelId label, const MaskVolume& eval_mask) {
  require_same_dims(pred, target, "dice pred/target");
  require_same_dims(pred, eval_mask, "dice eval mask");
  return count_overlap(pred, target, label, eval_mask).dice();
}

MaskVolume build_eval_mask(const MultiLabelAnnotation& annotation, const MaskVolume& roi) {
  if (annotation.dims() != roi.dims()) {
    throw Error(ErrorCode::DimMismatch, "annotation " + to_string(annotation.dims()) + " vs roi " +
                                            to_string(roi.dims()));
  }
  MaskVolume out = roi;
  for (std::size_t v = 0; v < roi.size(); ++v) {
    if (roi[v] && annotation.count(v) > 1) out[v] = 0;
  }
  return out;
}

DiceReport dice_report(const LabelVolume& pred, const LabelVolume& target, const LabelSet& labels,
                       const MaskVolume& eval_mask, const MaskVolume& roi) {
  require_same_dims(pred, target, "dice_report pred/target");
  require_same_dims(pred, eval_mask, "dice_report eval mask");
  require_same_dims(pred, roi, "dice_report roi");

  DiceReport report;
  double weighted = 0.0;
  double weight = 0.0;
  for (const auto& entry : labels.entries()) {
    const Overlap o = count_overlap(pred, target, entry.id, eval_mask);
    report.per_class.push_back({entry.id, entry.name, o.dice(), o.target, o.pred});
    weighted += o.dice() * static_cast<double>(o.target);
    weight += static_cast<double>(o.target);
  }
  report.overall = weight > 0.0 ? weighted / weight : 1.0;
  for (std::size_t v = 0; v < roi.size(); ++v) report.excluded_voxels += roi[v] && !eval_mask[v];
  return report;
}

DiceReport dice_report(const LabelVolume& pred, const LabelVolume& target, const LabelSet& labels,
                       const MaskVolume& eval_mask) {
  return dice_report(pred, target, labels, eval_mask, eval_mask);
}

std::string format_dice_table(const DiceReport& report) {
  std::ostringstream out;
  char line[128];
  std::snprintf(line, sizeof line, "%-8s %-12s %10s %10s %10s\n", "id", "name", "dice", "target", "pred");
  out << line;
  for (const auto& c : report.per_class) {
    std::snprintf(line, sizeof line, "%-8u %-12s %10.6f %10zu %10zu\n", static_cast<unsigned>(c.label),
                  c.name.c_str(), c.dice, c.target_volume, c.pred_volume);
    out << line;
  }
  std::snprintf(line, sizeof line, "overall %.6f\nexcluded_voxels %zu\n", report.overall, report.excluded_voxels);
  out << line;
  return out.str();
}

std::string dice_report_to_json(const DiceReport& report) {
  nlohmann::ordered_json j;
  auto& per_class = j["per_class"] = nlohmann::ordered_json::object();
  for (const auto& c : report.per_class) {
    per_class[c.name] = {{"label", c.label},
                         {"dice", c.dice},
                         {"target_volume", c.target_volume},
                         {"pred_volume", c.pred_volume}};
  }
  j["overall"] = report.overall;
  j["excluded_voxels"] = report.excluded_voxels;
  return j.dump(2) + "\n";
}

}  // namespace rwprop
