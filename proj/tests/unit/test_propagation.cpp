#include <gtest/gtest.h>

#include <json.hpp>

#include "rwprop/propagation.hpp"
#include "support/builders.hpp"

using namespace rwprop;
using rwprop::testing::grid_of;
using rwprop::testing::two_labels;

namespace {

PropagationRequest chain_request(std::size_t length) {
  const Grid g = grid_of(1, 1, length);
  PropagationRequest req;
  req.guidance = make_image(g, 0.5);
  req.roi = make_mask(g, true);
  req.annotation = MultiLabelAnnotation(g, two_labels());
  req.annotation.add_label(0, 1);
  req.annotation.add_label(length - 1, 2);
  req.solver.rel_tol = 1e-10;
  req.solver.threads = 1;
  return req;
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST(Propagate, FourVoxelChain) {
  const auto res = propagate(chain_request(4));
  const double expect[] = {1.0, 2.0 / 3.0, 1.0 / 3.0, 0.0};
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_NEAR(res.soft.maps[0][i], expect[i], 1e-9);
    EXPECT_NEAR(res.soft.maps[1][i], 1.0 - expect[i], 1e-9);
  }
  EXPECT_EQ(res.hard.data()[0], 1);
  EXPECT_EQ(res.hard.data()[1], 1);
  EXPECT_EQ(res.hard.data()[2], 2);
  EXPECT_EQ(res.hard.data()[3], 2);
  EXPECT_EQ(res.report.seeds, 2u);
  EXPECT_EQ(res.report.unseeded_filled, 2u);
}

TEST(Propagate, FullyLabeledNeedsNoSolve) {
  auto req = chain_request(4);
  req.annotation.add_label(1, 1);
  req.annotation.add_label(2, 2);
  const auto res = propagate(req);
  EXPECT_EQ(res.report.unseeded_filled, 0u);
  for (const auto& s : res.report.solves) EXPECT_EQ(s.iterations, 0u);
  EXPECT_EQ(res.hard.data()[1], 1);
  EXPECT_EQ(res.soft.maps[0][1], 1.0);
  EXPECT_EQ(res.soft.maps[1][1], 0.0);
}

TEST(Propagate, SingleSeedLabelFillsRoi) {
  const Grid g = grid_of(4, 4, 2);
  PropagationRequest req;
  req.guidance = make_image(g, 0.2);
  req.guidance[5] = 0.9;
  req.roi = make_mask(g, true);
  req.annotation = MultiLabelAnnotation(g, two_labels());
  req.annotation.add_label(3, 2);
  const auto res = propagate(req);
  for (std::size_t i = 0; i < g.voxel_count(); ++i) {
    EXPECT_EQ(res.hard[i], 2);
    EXPECT_DOUBLE_EQ(res.soft.maps[1][i], 1.0);
  }
}

TEST(Propagate, ConflictsAreClearedAndSeedsOutsideRoiDropped) {
  auto req = chain_request(5);
  req.annotation.add_label(2, 1);
  req.annotation.add_label(2, 2);
  req.roi[4] = 0;
  req.annotation.add_label(3, 2);
  const auto res = propagate(req);
  EXPECT_EQ(res.report.conflicts_cleared, 1u);
  EXPECT_EQ(res.report.seeds_outside_roi, 1u);
  EXPECT_EQ(res.report.seeds, 2u);
  EXPECT_EQ(res.hard[4], kBackground);
  EXPECT_EQ(res.soft.maps[0][4], 0.0);
}

TEST(Propagate, NoSeedsInRoi) {
  auto req = chain_request(4);
  req.roi[0] = 0;
  req.roi[3] = 0;
  EXPECT_EQ(code_of([&] { propagate(req); }), ErrorCode::NoSeedsInRoi);
}

TEST(Propagate, SeedlessPolicies) {
  const Grid g = grid_of(7, 1, 1);
  PropagationRequest req;
  req.guidance = make_image(g, 0.5);
  req.roi = MaskVolume(g, ElementKind::Mask, std::vector<std::uint8_t>{1, 1, 1, 0, 1, 1, 0});
  req.annotation = MultiLabelAnnotation(g, two_labels());
  req.annotation.add_label(0, 1);
  req.annotation.add_label(2, 2);

  req.seedless_policy = SeedlessPolicy::Error;
  try {
    propagate(req);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SeedlessComponent);
    EXPECT_NE(std::string(e.what()).find("component 1"), std::string::npos) << e.what();
  }

  req.seedless_policy = SeedlessPolicy::Background;
  auto res = propagate(req);
  EXPECT_EQ(res.hard[4], kBackground);
  EXPECT_EQ(res.hard[5], kBackground);
  EXPECT_EQ(res.report.seedless_components, 1u);
  EXPECT_EQ(res.report.seedless_voxels, 2u);

  req.seedless_policy = SeedlessPolicy::NearestSeed;
  res = propagate(req);
  EXPECT_EQ(res.hard[4], 2);
  EXPECT_EQ(res.hard[5], 2);
  EXPECT_EQ(res.soft.maps[1][5], 1.0);
  EXPECT_EQ(res.hard[1], 1);  // tie between seeds at distance 1 goes to the smaller id
}

TEST(Propagate, ReportJson) {
  const auto res = propagate(chain_request(6));
  const auto j = nlohmann::json::parse(report_to_json(res.report, two_labels()));
  EXPECT_EQ(j.at("seeds").get<int>(), 2);
  EXPECT_EQ(j.at("roi_voxels").get<int>(), 6);
  EXPECT_TRUE(j.contains("solves"));
}

namespace {

// 8x4x4 box, left half x < 4 and right half x >= 4, each with its own seeds.
PropagationRequest two_halves() {
  const Grid g = grid_of(8, 4, 4);
  PropagationRequest req;
  req.guidance = make_image(g);
  for (std::size_t i = 0; i < g.voxel_count(); ++i) req.guidance[i] = 0.01 * static_cast<double>(i % 13);
  req.roi = make_mask(g, true);
  req.annotation = MultiLabelAnnotation(g, LabelSet({{1, "A"}, {2, "B"}, {3, "C"}, {4, "D"}}));
  req.annotation.add_label(g.index(0, 0, 0), 1);
  req.annotation.add_label(g.index(3, 3, 3), 2);
  req.annotation.add_label(g.index(4, 0, 0), 3);
  req.annotation.add_label(g.index(7, 3, 3), 4);
  req.solver.threads = 1;
  req.beta = 30.0;
  return req;
}

std::pair<MaskVolume, MaskVolume> halves(const Grid& g) {
  MaskVolume l = make_mask(g), r = make_mask(g);
  for (std::size_t i = 0; i < g.voxel_count(); ++i) (g.coords(i)[0] < 4 ? l : r)[i] = 1;
  return {l, r};
}

}  // namespace

TEST(PropagateBilateral, EqualsSeparateRunsStitched) {
  const auto req = two_halves();
  const Grid& g = req.roi.grid();
  const auto hemi = halves(g);
  const auto both = propagate_bilateral(req, hemi);
  for (const MaskVolume* h : {&hemi.first, &hemi.second}) {
    auto sub = req;
    sub.roi = *h;
    const auto alone = propagate(sub);
    for (std::size_t i = 0; i < g.voxel_count(); ++i) {
      if (!(*h)[i]) continue;
      EXPECT_EQ(both.hard[i], alone.hard[i]);
      for (std::size_t k = 0; k < 4; ++k) EXPECT_NEAR(both.soft.maps[k][i], alone.soft.maps[k][i], 1e-12);
    }
  }
}

TEST(PropagateBilateral, LabelsDoNotCrossTheMidline) {
  const auto req = two_halves();
  const auto res = propagate_bilateral(req, halves(req.roi.grid()));
  const Grid& g = req.roi.grid();
  for (std::size_t i = 0; i < g.voxel_count(); ++i) {
    if (g.coords(i)[0] < 4) {
      EXPECT_LE(res.hard[i], 2);
    } else {
      EXPECT_GE(res.hard[i], 3);
    }
  }
}

TEST(PropagateBilateral, MirroredInputsGiveMirroredOutputs) {
  auto req = two_halves();
  const Grid& g = req.roi.grid();
  for (std::size_t i = 0; i < g.voxel_count(); ++i) {
    const auto c = g.coords(i);
    req.guidance[i] = req.guidance.at(c[0] < 4 ? c[0] : 7 - c[0], c[1], c[2]);
  }
  req.annotation = MultiLabelAnnotation(g, LabelSet({{1, "A"}, {2, "B"}, {3, "A_r"}, {4, "B_r"}}));
  req.annotation.add_label(g.index(0, 0, 0), 1);
  req.annotation.add_label(g.index(3, 3, 3), 2);
  req.annotation.add_label(g.index(7, 0, 0), 3);
  req.annotation.add_label(g.index(4, 3, 3), 4);
  const auto res = propagate_bilateral(req, halves(g));
  for (std::size_t i = 0; i < g.voxel_count(); ++i) {
    const auto c = g.coords(i);
    if (c[0] >= 4) continue;
    const std::size_t mirror = g.index(7 - c[0], c[1], c[2]);
    EXPECT_EQ(res.hard[mirror], res.hard[i] + 2);
    EXPECT_NEAR(res.soft.maps[0][i], res.soft.maps[2][mirror], 1e-9);
  }
}

TEST(PropagateBilateral, HemisphereWithoutSeeds) {
  auto req = two_halves();
  const Grid& g = req.roi.grid();
  req.annotation.set(g.index(4, 0, 0), 2, false);
  req.annotation.set(g.index(7, 3, 3), 3, false);
  EXPECT_EQ(code_of([&] { propagate_bilateral(req, halves(g)); }), ErrorCode::NoSeedsInRoi);
}

TEST(PropagateBilateral, OverlappingMasksRejected) {
  const auto req = two_halves();
  auto hemi = halves(req.roi.grid());
  hemi.second[0] = 1;
  EXPECT_EQ(code_of([&] { propagate_bilateral(req, hemi); }), ErrorCode::OverlappingHemispheres);
}
