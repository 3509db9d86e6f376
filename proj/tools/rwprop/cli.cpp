#include "rwprop/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "rwprop/fusion.hpp"
#include "rwprop/labels.hpp"
#include "rwprop/metrics.hpp"
#include "rwprop/nifti.hpp"
#include "rwprop/phantom.hpp"
#include "rwprop/prepare.hpp"
#include "rwprop/propagation.hpp"

namespace rwprop::cli {

namespace fs = std::filesystem;

namespace {

struct PropagateArgs {
  std::string guidance;
  std::string roi;
  std::string labels;
  std::vector<std::string> annotation;
  std::string left_hemisphere;
  std::string right_hemisphere;
  double beta = kDefaultBeta;
  std::string out;
  std::string policy = "nearest_seed";
  std::string preconditioner = "multigrid";
  double tol = 1e-8;
  std::size_t max_iters = 0;
  std::size_t threads = 0;
  bool soft = false;
  bool normalize = false;
};

struct FuseArgs {
  std::vector<std::string> in;
  std::string roi;
  std::string out;
};

struct EvaluateArgs {
  std::string pred;
  std::string target;
  std::string labels;
  std::string roi;
  std::vector<std::string> annotation;
  std::string out;
};

struct PhantomArgs {
  std::string spec;
  std::string preset;
  std::int64_t seed = -1;
  std::string out;
};

struct InfoArgs {
  std::string in;
};

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(ErrorCode::IoFailure, "cannot write " + path.string());
  f << text;
  if (!f) throw Error(ErrorCode::IoFailure, "write to " + path.string() + " failed");
}

std::string read_text(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::IoFailure, "cannot read " + path.string());
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

void ensure_directory(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw Error(ErrorCode::IoFailure, "cannot create output directory " + dir.string());
  }
}

// Label names become file-name fragments.
std::string file_safe(const std::string& name) {
  std::string out = name;
  for (char& c : out) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_') c = '_';
  }
  return out;
}

std::vector<fs::path> to_paths(const std::vector<std::string>& v) { return {v.begin(), v.end()}; }

int cmd_propagate(const PropagateArgs& a, std::ostream& out) {
  const LabelSet labels = read_label_set(a.labels);
  const auto paths = to_paths(a.annotation);

  PropagationRequest req;
  req.roi = nifti::read_mask(a.roi);
  req.guidance = nifti::read_intensity(a.guidance);
  if (a.normalize) req.guidance = min_max_normalize(req.guidance, req.roi);
  req.annotation = nifti::read_annotation(paths, labels);
  req.beta = a.beta;
  req.seedless_policy = parse_seedless_policy(a.policy);
  req.solver.rel_tol = a.tol;
  req.solver.max_iters = a.max_iters;
  req.solver.threads = a.threads;
  req.solver.preconditioner = parse_preconditioner(a.preconditioner);

  const bool bilateral = !a.left_hemisphere.empty() || !a.right_hemisphere.empty();
  if (bilateral && (a.left_hemisphere.empty() || a.right_hemisphere.empty())) {
    throw Error(ErrorCode::InvalidArgument, "--left-hemisphere and --right-hemisphere must be given together");
  }
  const fs::path dir = a.out;
  ensure_directory(dir);

  PropagationResult result =
      bilateral ? propagate_bilateral(req, {nifti::read_mask(a.left_hemisphere), nifti::read_mask(a.right_hemisphere)})
                : propagate(req);

  nifti::write_volume(result.hard, dir / "hard.nii");
  if (a.soft) {
    for (std::size_t k = 0; k < labels.size(); ++k) {
      nifti::write_volume(result.soft.maps[k], dir / ("prob_" + file_safe(labels[k].name) + ".nii"));
    }
  }
  write_text(dir / "report.json", report_to_json(result.report, labels));
  out << "propagated " << result.report.unseeded_filled << " voxel(s) from " << result.report.seeds
      << " seed(s); wrote " << (dir / "hard.nii").string() << "\n";
  return kOk;
}

int cmd_fuse(const FuseArgs& a, std::ostream& out) {
  if (a.in.size() < 2) throw Error(ErrorCode::TooFewMaps, "--in needs at least 2 label maps");
  std::vector<LabelVolume> maps;
  for (const auto& p : a.in) maps.push_back(nifti::read_labels(p));
  const MaskVolume roi = nifti::read_mask(a.roi);
  const LabelVolume fused = majority_vote(maps, roi);
  nifti::write_volume(fused, a.out);
  out << "fused " << maps.size() << " map(s) into " << a.out << "\n";
  return kOk;
}

int cmd_evaluate(const EvaluateArgs& a, std::ostream& out) {
  const LabelSet labels = read_label_set(a.labels);
  const LabelVolume pred = nifti::read_labels(a.pred);
  const LabelVolume target = nifti::read_labels(a.target);
  const MaskVolume roi = nifti::read_mask(a.roi);
  MaskVolume eval = roi;
  if (!a.annotation.empty()) {
    const auto paths = to_paths(a.annotation);
    eval = build_eval_mask(nifti::read_annotation(paths, labels), roi);
  }
  const DiceReport report = dice_report(pred, target, labels, eval, roi);

  fs::path base = a.out;
  if (base.has_parent_path()) ensure_directory(base.parent_path());
  fs::path text_path = base;
  fs::path json_path = base;
  if (base.extension() == ".json") {
    text_path.replace_extension(".txt");
  } else {
    json_path.replace_extension(".json");
    if (!base.has_extension()) text_path.replace_extension(".txt");
  }
  write_text(text_path, format_dice_table(report));
  write_text(json_path, dice_report_to_json(report));

  std::ostringstream line;
  line.precision(6);
  line << std::fixed << "overall " << report.overall << "\n";
  out << line.str();
  return kOk;
}

int cmd_phantom(const PhantomArgs& a, std::ostream& out) {
  PhantomSpec spec;
  if (!a.spec.empty()) {
    spec = parse_phantom_spec(read_text(a.spec));
  } else if (a.preset == "thalamus") {
    spec = thalamus_phantom_spec();
  } else {
    throw Error(ErrorCode::BadSpec, "unknown preset '" + a.preset + "'");
  }
  if (a.seed >= 0) spec.seed = static_cast<std::uint64_t>(a.seed);

  const Phantom ph = make_phantom(spec);
  const fs::path dir = a.out;
  ensure_directory(dir);
  nifti::write_volume(ph.guidance, dir / "guidance.nii");
  nifti::write_volume(ph.roi, dir / "roi.nii");
  nifti::write_volume(ph.truth, dir / "truth.nii");
  std::ostringstream labels;
  write_label_set(labels, ph.labels);
  write_text(dir / "labels.txt", labels.str());
  for (std::size_t k = 0; k < ph.labels.size(); ++k) {
    nifti::write_volume(ph.annotation.mask(k), dir / ("annotation_" + file_safe(ph.labels[k].name) + ".nii"));
  }
  out << "wrote phantom with " << ph.labels.size() << " label(s) to " << dir.string() << "\n";
  return kOk;
}

const char* datatype_name(std::int16_t dt) {
  switch (dt) {
    case nifti::kUint8: return "uint8";
    case nifti::kInt16: return "int16";
    case nifti::kUint16: return "uint16";
    case nifti::kFloat32: return "float32";
    default: return "unknown";
  }
}

int cmd_info(const InfoArgs& a, std::ostream& out) {
  const nifti::Header h = nifti::read_header(a.in);
  const ImageVolume v = nifti::read_intensity(a.in);
  const auto [lo, hi] = std::minmax_element(v.data().begin(), v.data().end());
  const Grid& g = v.grid();
  out << "file     " << a.in << "\n";
  out << "dims     " << g.dims.x << " x " << g.dims.y << " x " << g.dims.z << "\n";
  out << "spacing  " << g.spacing[0] << " " << g.spacing[1] << " " << g.spacing[2] << "\n";
  out << "origin   " << g.origin[0] << " " << g.origin[1] << " " << g.origin[2] << "\n";
  out << "datatype " << datatype_name(h.datatype) << " (" << h.datatype << ")\n";
  out << "range    " << *lo << " .. " << *hi << "\n";
  if (h.datatype != nifti::kFloat32) {
    std::map<long long, std::size_t> histogram;
    for (double x : v.data()) ++histogram[static_cast<long long>(x)];
    out << "labels\n";
    for (const auto& [id, count] : histogram) out << "  " << id << "\t" << count << "\n";
  }
  return kOk;
}

}  // namespace

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, out, err);
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Random-walker label propagation for multi-label 3D annotations", "rwprop"};
  app.require_subcommand(1);
  std::string verbosity = "warn";
  app.add_option("--log-level", verbosity, "trace|debug|info|warn|error|off")->capture_default_str();

  PropagateArgs pa;
  auto* propagate_cmd = app.add_subcommand("propagate", "Propagate annotation labels into unlabeled roi voxels");
  propagate_cmd->add_option("--guidance", pa.guidance, "Edge-map image (NIfTI)")->required()->check(CLI::ExistingFile);
  propagate_cmd->add_option("--roi", pa.roi, "Region-of-interest mask")->required()->check(CLI::ExistingFile);
  propagate_cmd->add_option("--labels", pa.labels, "Label set file (id<TAB>name)")->required()->check(CLI::ExistingFile);
  propagate_cmd->add_option("--annotation", pa.annotation, "One binary mask per label, in label-set order")
      ->required()
      ->check(CLI::ExistingFile);
  propagate_cmd->add_option("--beta", pa.beta, "Edge-weight sharpness")->capture_default_str();
  propagate_cmd->add_option("--out", pa.out, "Output directory")->required();
  propagate_cmd->add_option("--policy", pa.policy, "Seedless regions: nearest_seed|background|error")
      ->capture_default_str();
  propagate_cmd->add_option("--tol", pa.tol, "Relative residual tolerance")->capture_default_str();
  propagate_cmd->add_option("--max-iters", pa.max_iters, "CG iteration limit (0 = automatic)");
  propagate_cmd->add_option("--preconditioner", pa.preconditioner, "multigrid|jacobi|none")->capture_default_str();
  propagate_cmd->add_option("--threads", pa.threads, "Label solves run in parallel (0 = all cores)");
  propagate_cmd->add_option("--left-hemisphere", pa.left_hemisphere, "Propagate per hemisphere (with --right-hemisphere)")
      ->check(CLI::ExistingFile);
  propagate_cmd->add_option("--right-hemisphere", pa.right_hemisphere)->check(CLI::ExistingFile);
  propagate_cmd->add_flag("--soft", pa.soft, "Also write prob_<name>.nii per label");
  propagate_cmd->add_flag("--normalize", pa.normalize, "Min-max normalize the guidance inside the roi first");

  FuseArgs fa;
  auto* fuse_cmd = app.add_subcommand("fuse", "Majority-vote fusion of label maps");
  fuse_cmd->add_option("--in", fa.in, "Label maps to fuse (>= 2)")->required()->check(CLI::ExistingFile);
  fuse_cmd->add_option("--roi", fa.roi, "Region-of-interest mask")->required()->check(CLI::ExistingFile);
  fuse_cmd->add_option("--out", fa.out, "Fused label map")->required();

  EvaluateArgs ea;
  auto* evaluate_cmd = app.add_subcommand("evaluate", "Per-class and volume-weighted Dice");
  evaluate_cmd->add_option("--pred", ea.pred)->required()->check(CLI::ExistingFile);
  evaluate_cmd->add_option("--target", ea.target)->required()->check(CLI::ExistingFile);
  evaluate_cmd->add_option("--labels", ea.labels)->required()->check(CLI::ExistingFile);
  evaluate_cmd->add_option("--roi", ea.roi)->required()->check(CLI::ExistingFile);
  evaluate_cmd->add_option("--annotation", ea.annotation, "Annotation masks; multi-labeled voxels are excluded")
      ->check(CLI::ExistingFile);
  evaluate_cmd->add_option("--out", ea.out, "Report path (.txt table and .json)")->required();

  PhantomArgs ha;
  auto* phantom_cmd = app.add_subcommand("phantom", "Generate a synthetic phantom");
  auto* spec_opt = phantom_cmd->add_option("--spec", ha.spec, "Phantom spec (JSON)")->check(CLI::ExistingFile);
  auto* preset_opt = phantom_cmd->add_option("--preset", ha.preset, "Built-in spec: thalamus");
  spec_opt->excludes(preset_opt);
  phantom_cmd->add_option("--seed", ha.seed, "RNG seed (overrides the spec)");
  phantom_cmd->add_option("--out", ha.out, "Output directory")->required();

  InfoArgs ia;
  auto* info_cmd = app.add_subcommand("info", "Summarize a NIfTI volume");
  info_cmd->add_option("--in", ia.in)->required()->check(CLI::ExistingFile);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kOk;
    }
    err << "error: " << e.what() << "\n";
    const CLI::App* failed = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
    err << failed->help();
    return kInputError;
  }

  spdlog::set_level(spdlog::level::from_str(verbosity));

  try {
    if (*propagate_cmd) return cmd_propagate(pa, out);
    if (*fuse_cmd) return cmd_fuse(fa, out);
    if (*evaluate_cmd) return cmd_evaluate(ea, out);
    if (*phantom_cmd) {
      if (ha.spec.empty() && ha.preset.empty()) {
        err << "error: phantom needs --spec or --preset\n" << phantom_cmd->help();
        return kInputError;
      }
      return cmd_phantom(ha, out);
    }
    if (*info_cmd) return cmd_info(ia, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return is_numerical(e.code()) ? kNumericalError : kInputError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  }
  return kInputError;
}

}  // namespace rwprop::cli
