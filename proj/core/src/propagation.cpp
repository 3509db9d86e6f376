#include "rwprop/propagation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>

#include <json.hpp>
#include <spdlog/spdlog.h>

#include "rwprop/prepare.hpp"

namespace rwprop {

std::string_view to_string(SeedlessPolicy policy) noexcept {
  switch (policy) {
    case SeedlessPolicy::Error: return "error";
    case SeedlessPolicy::NearestSeed: return "nearest_seed";
    case SeedlessPolicy::Background: return "background";
  }
  return "unknown";
}

SeedlessPolicy parse_seedless_policy(std::string_view text) {
  if (text == "error") return SeedlessPolicy::Error;
  if (text == "nearest_seed") return SeedlessPolicy::NearestSeed;
  if (text == "background") return SeedlessPolicy::Background;
  throw Error(ErrorCode::InvalidArgument, "unknown seedless policy '" + std::string(text) + "'");
}

namespace {

struct SeedPoint {
  std::array<double, 3> pos;
  LabelId label;
};

std::array<double, 3> world_offset(const Grid& g, std::size_t voxel) {
  const auto c = g.coords(voxel);
  return {static_cast<double>(c[0]) * g.spacing[0], static_cast<double>(c[1]) * g.spacing[1],
          static_cast<double>(c[2]) * g.spacing[2]};
}

// Assigns each voxel the label of the closest seed in mm; equal distances go
// to the smaller label id.
void fill_nearest_seed(const std::vector<std::size_t>& voxels, const LabelVolume& seeds, const MaskVolume& roi,
                       SoftLabels& soft) {
  std::vector<SeedPoint> points;
  for (std::size_t v = 0; v < seeds.size(); ++v) {
    if (roi[v] && seeds[v] != kBackground) points.push_back({world_offset(seeds.grid(), v), seeds[v]});
  }
  for (std::size_t v : voxels) {
    const auto p = world_offset(seeds.grid(), v);
    double best = std::numeric_limits<double>::infinity();
    LabelId label = kBackground;
    for (const auto& s : points) {
      const double dx = p[0] - s.pos[0];
      const double dy = p[1] - s.pos[1];
      const double dz = p[2] - s.pos[2];
      const double d = dx * dx + dy * dy + dz * dz;
      if (d < best || (d == best && s.label < label)) {
        best = d;
        label = s.label;
      }
    }
    const auto k = static_cast<std::size_t>(std::lower_bound(soft.ids.begin(), soft.ids.end(), label) -
                                            soft.ids.begin());
    for (std::size_t j = 0; j < soft.maps.size(); ++j) soft.maps[j][v] = j == k ? 1.0 : 0.0;
  }
}

SoftLabels empty_soft(const LabelSet& labels, const Grid& grid) {
  SoftLabels soft;
  soft.ids = labels.ids();
  soft.maps.assign(labels.size(), ImageVolume(grid, ElementKind::Probability, 0.0));
  return soft;
}

void check_request(const PropagationRequest& req) {
  require_same_dims(req.guidance, req.roi, "guidance/roi");
  if (req.annotation.dims() != req.roi.dims()) {
    throw Error(ErrorCode::DimMismatch, "annotation " + to_string(req.annotation.dims()) + " vs roi " +
                                            to_string(req.roi.dims()));
  }
  if (!(req.beta >= 0.0) || !std::isfinite(req.beta)) {
    throw Error(ErrorCode::InvalidArgument, "beta must be finite and >= 0");
  }
  req.solver.validate();
}

}  // namespace

PropagationResult propagate(const PropagationRequest& req) {
  check_request(req);
  const LabelSet& labels = req.annotation.labels();
  const Grid& grid = req.roi.grid();

  PropagationResult result;
  PropagationReport& report = result.report;

  SeedSplit split = strip_conflicts(req.annotation);
  for (std::size_t v = 0; v < req.roi.size(); ++v) {
    if (req.roi[v]) {
      ++report.roi_voxels;
      if (split.seeds[v] != kBackground) ++report.seeds;
      if (split.conflicts[v]) ++report.conflicts_cleared;
    } else if (split.seeds[v] != kBackground) {
      ++report.seeds_outside_roi;
      split.seeds[v] = kBackground;
    }
  }
  if (report.roi_voxels == 0) throw Error(ErrorCode::EmptyRoi, "roi contains no voxels");
  if (report.seeds == 0) throw Error(ErrorCode::NoSeedsInRoi, "no single-labeled voxel inside the roi");
  if (report.seeds_outside_roi > 0) {
    spdlog::warn("discarded {} seed voxel(s) outside the roi", report.seeds_outside_roi);
  }

  LatticeGraph graph = build_lattice(req.guidance, req.roi, req.beta);
  const Components comps = connected_components(graph);
  report.components = comps.count;

  std::vector<bool> seeded_comp(comps.count, false);
  for (std::size_t n = 0; n < graph.node_count(); ++n) {
    if (split.seeds[graph.voxel_of(n)] != kBackground) seeded_comp[comps.id[n]] = true;
  }
  std::vector<std::size_t> seedless_voxels;
  MaskVolume active = req.roi;
  for (std::size_t n = 0; n < graph.node_count(); ++n) {
    if (!seeded_comp[comps.id[n]]) {
      seedless_voxels.push_back(graph.voxel_of(n));
      active[graph.voxel_of(n)] = 0;
    }
  }
  report.seedless_components =
      static_cast<std::size_t>(std::count(seeded_comp.begin(), seeded_comp.end(), false));
  report.seedless_voxels = seedless_voxels.size();

  if (report.seedless_components > 0) {
    const auto first = static_cast<std::size_t>(std::find(seeded_comp.begin(), seeded_comp.end(), false) -
                                                seeded_comp.begin());
    if (req.seedless_policy == SeedlessPolicy::Error) {
      throw Error(ErrorCode::SeedlessComponent,
                  "roi component " + std::to_string(first) + " (" + std::to_string(comps.sizes()[first]) +
                      " voxels) has no seed; " + std::to_string(report.seedless_components) +
                      " seedless component(s) in total");
    }
    spdlog::warn("{} roi component(s) with {} voxel(s) have no seed; applying policy '{}'",
                 report.seedless_components, report.seedless_voxels, to_string(req.seedless_policy));
    graph = build_lattice(req.guidance, active, req.beta);
  }

  std::vector<LabelId> node_seeds(graph.node_count());
  for (std::size_t n = 0; n < graph.node_count(); ++n) node_seeds[n] = split.seeds[graph.voxel_of(n)];
  const DirichletSystem sys = assemble(graph, node_seeds, labels);
  const DirichletSolution solution = solve_all(sys, req.solver);

  report.unseeded_filled = sys.unseeded_count();
  report.renormalized_nodes = solution.renormalized_nodes;
  for (const auto& s : solution.solves) report.solves.push_back({s.label, s.iterations, s.residual});

  result.soft = empty_soft(labels, grid);
  const std::size_t m = labels.size();
  for (std::size_t n = 0; n < graph.node_count(); ++n) {
    const std::size_t v = graph.voxel_of(n);
    for (std::size_t k = 0; k < m; ++k) result.soft.maps[k][v] = solution.field.at(n, k);
  }
  if (req.seedless_policy == SeedlessPolicy::NearestSeed && !seedless_voxels.empty()) {
    fill_nearest_seed(seedless_voxels, split.seeds, req.roi, result.soft);
  }

  result.hard = argmax_labels(result.soft, req.roi);
  return result;
}

PropagationResult propagate_bilateral(const PropagationRequest& req,
                                      const std::pair<MaskVolume, MaskVolume>& hemispheres) {
  check_request(req);
  const auto& [left, right] = hemispheres;
  require_same_dims(left, req.roi, "left hemisphere/roi");
  require_same_dims(right, req.roi, "right hemisphere/roi");

  std::vector<std::size_t> leftover;
  for (std::size_t v = 0; v < req.roi.size(); ++v) {
    if (left[v] && right[v]) {
      throw Error(ErrorCode::OverlappingHemispheres, "hemisphere masks overlap at voxel " + std::to_string(v));
    }
    if ((left[v] || right[v]) && !req.roi[v]) {
      throw Error(ErrorCode::InvalidArgument, "hemisphere mask extends outside the roi at voxel " + std::to_string(v));
    }
    if (req.roi[v] && !left[v] && !right[v]) leftover.push_back(v);
  }

  const LabelSet& labels = req.annotation.labels();
  PropagationResult merged;
  merged.soft = empty_soft(labels, req.roi.grid());
  auto& total = merged.report;

  int side = 0;
  for (const MaskVolume* hemi : {&left, &right}) {
    const char* name = side++ == 0 ? "left" : "right";
    PropagationRequest sub = req;
    sub.roi = *hemi;
    for (std::size_t v = 0; v < sub.roi.size(); ++v) {
      if (sub.roi[v]) continue;
      for (std::size_t k = 0; k < labels.size(); ++k) sub.annotation.set(v, k, false);
    }
    PropagationResult part;
    try {
      part = propagate(sub);
    } catch (const Error& e) {
      throw Error(e.code(), std::string(name) + " hemisphere: " + e.what());
    }
    for (std::size_t k = 0; k < labels.size(); ++k) {
      auto dst = merged.soft.maps[k].data();
      auto src = part.soft.maps[k].data();
      for (std::size_t v = 0; v < dst.size(); ++v) {
        if ((*hemi)[v]) dst[v] = src[v];
      }
    }
    const auto& r = part.report;
    total.roi_voxels += r.roi_voxels;
    total.seeds += r.seeds;
    total.conflicts_cleared += r.conflicts_cleared;
    total.unseeded_filled += r.unseeded_filled;
    total.components += r.components;
    total.seedless_components += r.seedless_components;
    total.seedless_voxels += r.seedless_voxels;
    total.renormalized_nodes += r.renormalized_nodes;
    total.solves.insert(total.solves.end(), r.solves.begin(), r.solves.end());
  }

  // Seeds that fall in the roi but outside both hemispheres are not dropped;
  // they only anchor the leftover voxels below.
  const SeedSplit split = strip_conflicts(req.annotation);
  for (std::size_t v = 0; v < req.roi.size(); ++v) {
    if (!req.roi[v] && split.seeds[v] != kBackground) ++total.seeds_outside_roi;
  }
  if (!leftover.empty()) {
    total.roi_voxels += leftover.size();
    total.seedless_voxels += leftover.size();
    if (req.seedless_policy == SeedlessPolicy::Error) {
      throw Error(ErrorCode::SeedlessComponent,
                  std::to_string(leftover.size()) + " roi voxel(s) lie outside both hemisphere masks");
    }
    if (req.seedless_policy == SeedlessPolicy::NearestSeed) {
      fill_nearest_seed(leftover, split.seeds, req.roi, merged.soft);
    }
  }

  merged.hard = argmax_labels(merged.soft, req.roi);
  return merged;
}

std::string report_to_json(const PropagationReport& report, const LabelSet& labels) {
  nlohmann::ordered_json j;
  j["roi_voxels"] = report.roi_voxels;
  j["seeds"] = report.seeds;
  j["seeds_outside_roi"] = report.seeds_outside_roi;
  j["conflicts_cleared"] = report.conflicts_cleared;
  j["unseeded_filled"] = report.unseeded_filled;
  j["components"] = report.components;
  j["seedless_components"] = report.seedless_components;
  j["seedless_voxels"] = report.seedless_voxels;
  j["renormalized_nodes"] = report.renormalized_nodes;
  auto& solves = j["solves"] = nlohmann::ordered_json::array();
  for (const auto& s : report.solves) {
    nlohmann::ordered_json e;
    e["label"] = s.label;
    e["name"] = labels.contains(s.label) ? labels.name_of(s.label) : std::string();
    e["iterations"] = s.iterations;
    e["residual"] = s.residual;
    solves.push_back(std::move(e));
  }
  return j.dump(2) + "\n";
}

}  // namespace rwprop
