#include "rwprop/phantom.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>

#include <json.hpp>

namespace rwprop {

void PhantomSpec::validate() const {
  auto bad = [](const std::string& what) { throw Error(ErrorCode::BadSpec, what); };
  if (dims.x == 0 || dims.y == 0 || dims.z == 0) bad("dims must be >= 1");
  for (double s : spacing) {
    if (!(s > 0.0)) bad("spacing must be positive");
  }
  for (double r : roi_radii) {
    if (!(r > 0.0)) bad("roi radii must be positive");
  }
  if (blobs.empty()) bad("at least one blob is required");
  if (!(unlabeled_fraction >= 0.0 && unlabeled_fraction <= 1.0)) bad("unlabeled_fraction must be in [0,1]");
  if (!(conflict_fraction >= 0.0 && conflict_fraction <= 1.0)) bad("conflict_fraction must be in [0,1]");
  if (conflict_fraction > 0.0 && blobs.size() < 2) bad("conflicts need at least two blobs");
  if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma)) bad("noise_sigma must be >= 0");
  for (const auto& island : islands) {
    if (!(island.radius > 0.0)) bad("island radius must be positive");
  }
  try {
    (void)label_set();
  } catch (const Error& e) {
    bad(std::string("blob labels: ") + e.what());
  }
}

LabelSet PhantomSpec::label_set() const {
  std::vector<LabelSet::Entry> entries;
  for (const auto& b : blobs) {
    entries.push_back({b.label, b.name.empty() ? "label" + std::to_string(b.label) : b.name});
  }
  std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  return LabelSet(std::move(entries));
}

namespace {

double sq(double v) { return v * v; }

bool in_ellipsoid(const PhantomSpec& spec, const std::array<std::size_t, 3>& c) {
  double r = 0.0;
  for (int a = 0; a < 3; ++a) r += sq((static_cast<double>(c[a]) - spec.roi_center[a]) / spec.roi_radii[a]);
  return r <= 1.0;
}

bool in_island(const PhantomSpec& spec, const std::array<std::size_t, 3>& c) {
  for (const auto& island : spec.islands) {
    double d = 0.0;
    for (int a = 0; a < 3; ++a) d += sq(static_cast<double>(c[a]) - island.center[a]);
    if (d <= sq(island.radius)) return true;
  }
  return false;
}

std::size_t nearest_blob(const PhantomSpec& spec, const std::array<std::size_t, 3>& c) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t b = 0; b < spec.blobs.size(); ++b) {
    double d = 0.0;
    for (int a = 0; a < 3; ++a) d += sq((static_cast<double>(c[a]) - spec.blobs[b].center[a]) * spec.spacing[a]);
    if (d < best_d || (d == best_d && spec.blobs[b].label < spec.blobs[best].label)) {
      best_d = d;
      best = b;
    }
  }
  return best;
}

}  // namespace

Phantom make_phantom(const PhantomSpec& spec) {
  spec.validate();

  Grid grid;
  grid.dims = spec.dims;
  grid.spacing = spec.spacing;

  Phantom ph;
  ph.labels = spec.label_set();
  ph.guidance = ImageVolume(grid, ElementKind::Intensity, spec.background_intensity);
  ph.roi = make_mask(grid);
  ph.truth = make_labels(grid);
  ph.annotation = MultiLabelAnnotation(grid, ph.labels);

  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> noise(0.0, spec.noise_sigma);

  std::vector<std::size_t> blob_of(grid.voxel_count(), spec.blobs.size());
  std::vector<std::size_t> ellipsoid_voxels;
  std::vector<bool> island(grid.voxel_count(), false);
  for (std::size_t v = 0; v < grid.voxel_count(); ++v) {
    const auto c = grid.coords(v);
    const bool core = in_ellipsoid(spec, c);
    const bool extra = !core && in_island(spec, c);
    if (core || extra) {
      const std::size_t b = nearest_blob(spec, c);
      blob_of[v] = b;
      ph.roi[v] = 1;
      ph.truth[v] = spec.blobs[b].label;
      ph.guidance[v] = spec.blobs[b].intensity;
      if (core) ellipsoid_voxels.push_back(v);
      island[v] = extra;
    }
    if (spec.noise_sigma > 0.0) ph.guidance[v] += noise(rng);
  }
  if (ellipsoid_voxels.empty()) throw Error(ErrorCode::BadSpec, "roi ellipsoid contains no voxel");

  // Blobs whose regions touch, used to pick the second label of a conflict.
  std::vector<std::set<std::size_t>> touching(spec.blobs.size());
  const std::size_t stride[3] = {1, grid.dims.x, grid.dims.x * grid.dims.y};
  const std::size_t extent[3] = {grid.dims.x, grid.dims.y, grid.dims.z};
  for (std::size_t v : ellipsoid_voxels) {
    const auto c = grid.coords(v);
    for (int a = 0; a < 3; ++a) {
      if (c[a] + 1 >= extent[a]) continue;
      const std::size_t w = v + stride[a];
      if (!ph.roi[w] || island[w] || blob_of[w] == blob_of[v]) continue;
      touching[blob_of[v]].insert(blob_of[w]);
      touching[blob_of[w]].insert(blob_of[v]);
    }
  }

  std::vector<bool> protected_voxel(grid.voxel_count(), false);
  if (spec.retain_blob_centers) {
    for (const auto& b : spec.blobs) {
      std::array<std::size_t, 3> c{};
      for (int a = 0; a < 3; ++a) {
        const double r = std::round(b.center[a]);
        if (r < 0.0 || r >= static_cast<double>(extent[a])) {
          throw Error(ErrorCode::BadSpec, "blob " + std::to_string(b.label) + " center lies outside the grid");
        }
        c[a] = static_cast<std::size_t>(r);
      }
      const std::size_t v = grid.index(c[0], c[1], c[2]);
      if (!ph.roi[v] || ph.truth[v] != b.label) {
        throw Error(ErrorCode::BadSpec, "blob " + std::to_string(b.label) + " center is not inside its own region");
      }
      protected_voxel[v] = true;
    }
  }

  std::vector<std::size_t> candidates;
  std::vector<std::size_t> kept;
  for (std::size_t v : ellipsoid_voxels) (protected_voxel[v] ? kept : candidates).push_back(v);

  // Voxels left unlabeled come first in the shuffled order, then conflicts.
  std::shuffle(candidates.begin(), candidates.end(), rng);
  const auto n_unlabeled = static_cast<std::size_t>(
      std::llround(spec.unlabeled_fraction * static_cast<double>(ellipsoid_voxels.size())));
  const std::size_t unlabeled = std::min(n_unlabeled, candidates.size());
  const std::size_t labeled_total = ellipsoid_voxels.size() - unlabeled;
  const std::size_t conflicts = std::min(
      static_cast<std::size_t>(std::llround(spec.conflict_fraction * static_cast<double>(labeled_total))),
      candidates.size() - unlabeled);

  for (std::size_t i = unlabeled; i < candidates.size(); ++i) kept.push_back(candidates[i]);
  for (std::size_t v : kept) ph.annotation.add_label(v, ph.truth[v]);

  for (std::size_t i = unlabeled; i < unlabeled + conflicts; ++i) {
    const std::size_t v = candidates[i];
    const std::size_t b = blob_of[v];
    std::vector<std::size_t> options(touching[b].begin(), touching[b].end());
    if (options.empty()) {
      for (std::size_t o = 0; o < spec.blobs.size(); ++o) {
        if (o != b) options.push_back(o);
      }
    }
    std::uniform_int_distribution<std::size_t> pick(0, options.size() - 1);
    ph.annotation.add_label(v, spec.blobs[options[pick(rng)]].label);
  }
  return ph;
}

namespace {

using nlohmann::json;

template <typename T, std::size_t N>
std::array<T, N> read_array(const json& j, const char* key) {
  if (!j.is_array() || j.size() != N) {
    throw Error(ErrorCode::BadSpec, std::string(key) + " must be an array of " + std::to_string(N));
  }
  std::array<T, N> out{};
  for (std::size_t i = 0; i < N; ++i) out[i] = j[i].get<T>();
  return out;
}

void reject_unknown(const json& obj, std::initializer_list<const char*> known, const char* where) {
  for (const auto& [key, _] : obj.items()) {
    if (std::none_of(known.begin(), known.end(), [&](const char* k) { return key == k; })) {
      throw Error(ErrorCode::BadSpec, std::string("unknown key '") + key + "' in " + where);
    }
  }
}

}  // namespace

PhantomSpec parse_phantom_spec(std::string_view json_text) {
  PhantomSpec spec;
  try {
    const json j = json::parse(json_text);
    if (!j.is_object()) throw Error(ErrorCode::BadSpec, "phantom spec must be a JSON object");
    reject_unknown(j,
                   {"dims", "spacing", "roi_center", "roi_radii", "blobs", "islands", "background_intensity",
                    "noise_sigma", "unlabeled_fraction", "conflict_fraction", "retain_blob_centers", "seed"},
                   "phantom spec");
    const auto d = read_array<long long, 3>(j.at("dims"), "dims");
    for (auto v : d) {
      if (v < 1) throw Error(ErrorCode::BadSpec, "dims must be >= 1");
    }
    spec.dims = {static_cast<std::size_t>(d[0]), static_cast<std::size_t>(d[1]), static_cast<std::size_t>(d[2])};
    spec.roi_center = {(spec.dims.x - 1) / 2.0, (spec.dims.y - 1) / 2.0, (spec.dims.z - 1) / 2.0};
    spec.roi_radii = {spec.dims.x * 0.4, spec.dims.y * 0.4, spec.dims.z * 0.4};
    if (j.contains("spacing")) spec.spacing = read_array<double, 3>(j["spacing"], "spacing");
    if (j.contains("roi_center")) spec.roi_center = read_array<double, 3>(j["roi_center"], "roi_center");
    if (j.contains("roi_radii")) spec.roi_radii = read_array<double, 3>(j["roi_radii"], "roi_radii");
    for (const auto& b : j.at("blobs")) {
      reject_unknown(b, {"label", "name", "center", "intensity"}, "blob");
      PhantomSpec::Blob blob;
      const auto label = b.at("label").get<long long>();
      if (label < 1 || label > 0xFFFF) throw Error(ErrorCode::BadSpec, "blob label out of range");
      blob.label = static_cast<LabelId>(label);
      blob.name = b.value("name", std::string());
      blob.center = read_array<double, 3>(b.at("center"), "center");
      blob.intensity = b.at("intensity").get<double>();
      spec.blobs.push_back(std::move(blob));
    }
    if (j.contains("islands")) {
      for (const auto& i : j["islands"]) {
        reject_unknown(i, {"center", "radius"}, "island");
        spec.islands.push_back({read_array<double, 3>(i.at("center"), "center"), i.at("radius").get<double>()});
      }
    }
    spec.background_intensity = j.value("background_intensity", spec.background_intensity);
    spec.noise_sigma = j.value("noise_sigma", spec.noise_sigma);
    spec.unlabeled_fraction = j.value("unlabeled_fraction", spec.unlabeled_fraction);
    spec.conflict_fraction = j.value("conflict_fraction", spec.conflict_fraction);
    spec.retain_blob_centers = j.value("retain_blob_centers", spec.retain_blob_centers);
    spec.seed = j.value("seed", spec.seed);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::BadSpec, e.what());
  }
  spec.validate();
  return spec;
}

std::string phantom_spec_to_json(const PhantomSpec& spec) {
  nlohmann::ordered_json j;
  j["dims"] = {spec.dims.x, spec.dims.y, spec.dims.z};
  j["spacing"] = spec.spacing;
  j["roi_center"] = spec.roi_center;
  j["roi_radii"] = spec.roi_radii;
  auto& blobs = j["blobs"] = nlohmann::ordered_json::array();
  for (const auto& b : spec.blobs) {
    blobs.push_back({{"label", b.label}, {"name", b.name}, {"center", b.center}, {"intensity", b.intensity}});
  }
  auto& islands = j["islands"] = nlohmann::ordered_json::array();
  for (const auto& i : spec.islands) islands.push_back({{"center", i.center}, {"radius", i.radius}});
  j["background_intensity"] = spec.background_intensity;
  j["noise_sigma"] = spec.noise_sigma;
  j["unlabeled_fraction"] = spec.unlabeled_fraction;
  j["conflict_fraction"] = spec.conflict_fraction;
  j["retain_blob_centers"] = spec.retain_blob_centers;
  j["seed"] = spec.seed;
  return j.dump(2) + "\n";
}

PhantomSpec thalamus_phantom_spec(double unlabeled_fraction, double conflict_fraction, std::uint64_t seed) {
  PhantomSpec spec;
  spec.dims = {64, 96, 64};
  spec.roi_center = {31.5, 47.5, 31.5};
  spec.roi_radii = {26.0, 40.0, 26.0};
  spec.noise_sigma = 0.01;
  spec.unlabeled_fraction = unlabeled_fraction;
  spec.conflict_fraction = conflict_fraction;
  spec.seed = seed;

  struct Site {
    const char* name;
    std::array<double, 3> center;
  };
  // Three layers along z: 4 + 5 + 4 nuclei.
  const Site sites[] = {
      {"AN", {20, 30, 20}},  {"CL", {43, 30, 20}},   {"CM", {20, 65, 20}},  {"LD", {43, 65, 20}},
      {"LP", {16, 25, 32}},  {"MD", {31.5, 47.5, 32}}, {"PuA", {47, 25, 32}}, {"PuI", {16, 70, 32}},
      {"VA", {47, 70, 32}},  {"VLA", {20, 47, 43}},  {"VLP", {43, 47, 43}}, {"VPL", {31, 22, 43}},
      {"VPM", {31, 73, 43}},
  };
  LabelId id = 1;
  for (const auto& s : sites) {
    // Intensities 0.10, 0.165, ... 0.88: every pair differs by at least 0.065.
    spec.blobs.push_back({id, s.name, s.center, 0.10 + 0.065 * (id - 1)});
    ++id;
  }
  return spec;
}

}  // namespace rwprop
