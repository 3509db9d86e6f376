#include <gtest/gtest.h>

#include <json.hpp>

#include "rwprop/fusion.hpp"
#include "rwprop/metrics.hpp"
#include "support/builders.hpp"

using namespace rwprop;
using rwprop::testing::grid_of;

namespace {

LabelVolume row(std::vector<LabelId> v) { return LabelVolume(grid_of(v.size(), 1, 1), ElementKind::Label, v); }
MaskVolume mask_row(std::vector<std::uint8_t> v) { return MaskVolume(grid_of(v.size(), 1, 1), ElementKind::Mask, v); }

}  // namespace

TEST(MajorityVote, UnanimousMajorityAndTies) {
  const auto roi = mask_row({1, 1, 1, 1});
  const auto fused = majority_vote({row({3, 2, 5, 0}), row({3, 2, 5, 0}), row({3, 2, 2, 4}), row({3, 7, 2, 4})}, roi);
  EXPECT_EQ(fused[0], 3);
  EXPECT_EQ(fused[1], 2);
  EXPECT_EQ(fused[2], 2);
  EXPECT_EQ(fused[3], 0);  // background 2 vs 4 2: background has the smaller id
}

TEST(MajorityVote, OutsideRoiIsBackground) {
  const auto fused = majority_vote({row({1, 1}), row({1, 1})}, mask_row({1, 0}));
  EXPECT_EQ(fused[1], kBackground);
}

TEST(MajorityVote, Errors) {
  try {
    majority_vote({row({1})}, mask_row({1}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::TooFewMaps);
  }
  try {
    majority_vote({row({1}), row({1, 2})}, mask_row({1}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DimMismatch);
  }
}

TEST(Dice, HandCounts) {
  const auto all = mask_row({1, 1, 1, 1});
  EXPECT_DOUBLE_EQ(dice(row({1, 1, 0, 0}), row({1, 1, 0, 0}), 1, all), 1.0);
  EXPECT_DOUBLE_EQ(dice(row({1, 1, 0, 0}), row({0, 0, 1, 1}), 1, all), 0.0);
  EXPECT_DOUBLE_EQ(dice(row({1, 1, 0, 0}), row({0, 1, 1, 0}), 1, all), 0.5);
  EXPECT_DOUBLE_EQ(dice(row({0, 0, 0, 0}), row({0, 0, 0, 0}), 1, all), 1.0);
}

TEST(EvalMask, ExcludesConflictsAndOutsideRoi) {
  const LabelSet ls({{3, "MD"}, {5, "CL"}});
  MultiLabelAnnotation a(grid_of(4, 1, 1), ls);
  a.add_label(0, 3);
  a.add_label(1, 3);
  a.add_label(1, 5);
  a.add_label(3, 5);
  const auto m = build_eval_mask(a, mask_row({1, 1, 1, 0}));
  EXPECT_EQ(m, mask_row({1, 0, 1, 0}));
  MultiLabelAnnotation clean(grid_of(4, 1, 1), ls);
  clean.add_label(2, 5);
  EXPECT_EQ(build_eval_mask(clean, mask_row({1, 1, 1, 0})), mask_row({1, 1, 1, 0}));
}

TEST(DiceReport, VolumeWeightedOverall) {
  const LabelSet ls({{1, "A"}, {2, "B"}, {3, "C"}});
  const auto target = row({1, 1, 1, 2});
  const auto pred = row({1, 1, 1, 3});
  const auto r = dice_report(pred, target, ls, mask_row({1, 1, 1, 1}));
  ASSERT_EQ(r.per_class.size(), 3u);
  EXPECT_DOUBLE_EQ(r.per_class[0].dice, 1.0);
  EXPECT_DOUBLE_EQ(r.per_class[1].dice, 0.0);
  EXPECT_EQ(r.per_class[2].target_volume, 0u);
  EXPECT_DOUBLE_EQ(r.per_class[2].dice, 0.0);
  EXPECT_DOUBLE_EQ(r.overall, 0.75);
}

TEST(DiceReport, IdentityAndMissingClass) {
  const LabelSet ls({{1, "A"}, {2, "B"}, {9, "Z"}});
  const auto t = row({1, 2, 2, 0});
  const auto r = dice_report(t, t, ls, mask_row({1, 1, 1, 1}));
  for (const auto& c : r.per_class) EXPECT_DOUBLE_EQ(c.dice, 1.0);
  EXPECT_EQ(r.per_class[2].target_volume, 0u);
  EXPECT_DOUBLE_EQ(r.overall, 1.0);
}

TEST(DiceReport, ExcludedCountAndJson) {
  const LabelSet ls({{1, "A"}});
  const auto t = row({1, 1, 0});
  const auto r = dice_report(t, t, ls, mask_row({1, 0, 0}), mask_row({1, 1, 1}));
  EXPECT_EQ(r.excluded_voxels, 2u);
  const auto j = nlohmann::json::parse(dice_report_to_json(r));
  EXPECT_DOUBLE_EQ(j.at("overall").get<double>(), 1.0);
  EXPECT_EQ(j.at("excluded_voxels").get<int>(), 2);
  EXPECT_TRUE(j.at("per_class").contains("A"));
  EXPECT_NE(format_dice_table(r).find("A"), std::string::npos);
}
