#include "cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>
#include <spdlog/sinks/ostream_sink.h>
#include <spdlog/spdlog.h>

#include "regrasp/errors.hpp"
#include "regrasp/scene_io.hpp"

namespace regrasp::cli {

namespace {

std::shared_ptr<spdlog::logger> make_logger(std::ostream& err) {
  auto sink = std::make_shared<spdlog::sinks::ostream_sink_mt>(err);
  auto logger = std::make_shared<spdlog::logger>("regrasp", sink);
  logger->set_pattern("[%l] %v");
  spdlog::level::level_enum level = spdlog::level::info;
  if (const char* env = std::getenv("REGRASP_LOG")) {
    const std::string name = env;
    if (name == "error") level = spdlog::level::err;
    else if (name == "debug") level = spdlog::level::debug;
    else if (name != "info") logger->warn("ignoring REGRASP_LOG={} (expected error, info or debug)", name);
  }
  logger->set_level(level);
  return logger;
}

JointConfig load_seed_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open '" + path.string() + "'");
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw LoadError(std::string("seed config: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("joint_angles")) throw LoadError("missing required field", "joint_angles");
  for (const auto& [key, value] : doc.items()) {
    if (key != "joint_angles" && key != "format_version") throw LoadError("unknown field '" + key + "'");
  }
  if (doc.contains("format_version") && doc["format_version"] != kFormatVersion) {
    throw LoadError("unsupported version", "format_version");
  }
  JointConfig config;
  try {
    for (const auto& row : doc["joint_angles"]) {
      const auto values = row.get<std::vector<double>>();
      config.angles.push_back(Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size())));
    }
  } catch (const nlohmann::json::exception& e) {
    throw LoadError(e.what(), "joint_angles");
  }
  return config;
}

struct PlanArgs {
  std::string scene, variant, out, metrics, seed;
  int max_iters = 0;
};

int cmd_plan(const PlanArgs& a, std::ostream& out, spdlog::logger& log) {
  Scene scene = load_scene(a.scene);
  scene.params.repose.variant = repose_variant_from_string(a.variant);
  if (a.max_iters > 0) scene.params.max_iterations = a.max_iters;
  if (!a.seed.empty()) {
    scene.initial_joints = load_seed_config(a.seed);
    scene.validate();
  }
  log.info("planning scene '{}' with the {} variant", scene.name, to_string(scene.params.repose.variant));
  const Plan plan = plan_regrasp(scene);
  save_plan(plan, a.out);
  write_metrics_csv(plan, a.metrics);

  const PlanStep& last = plan.steps.back();
  const double per_call =
      plan.repose_stats.calls > 0
          ? static_cast<double>(plan.repose_stats.objective_evals + plan.repose_stats.constraint_evals) /
                plan.repose_stats.calls
          : 0.0;
  out << "scene=" << scene.name << "\n"
      << "variant=" << to_string(scene.params.repose.variant) << "\n"
      << "status=" << to_string(plan.status) << "\n"
      << "iterations=" << plan.iterations << "\n"
      << "final_max_error_mm=" << last.max_error * 1e3 << "\n"
      << "final_avg_error_mm=" << last.avg_error * 1e3 << "\n"
      << "initial_max_error_mm=" << plan.steps.front().max_error * 1e3 << "\n"
      << "repose_calls=" << plan.repose_stats.calls << "\n"
      << "repose_evals_per_call=" << per_call << "\n"
      << "wall_time_s=" << plan.wall_time << "\n";
  return plan.status == PlanStatus::kReached ? kOk : kNotReached;
}

struct WorkspaceArgs {
  std::string hand, out;
  int finger = 0;
  double voxel_mm = kDefaultWorkspaceVoxel * 1e3;
  int samples = kDefaultWorkspaceSamples;
};

int cmd_workspace(const WorkspaceArgs& a, std::ostream& out, spdlog::logger& log) {
  const HandModel hand = load_hand(a.hand);
  if (a.finger < 0 || a.finger >= hand.finger_count()) {
    throw StructuralInputError("finger index " + std::to_string(a.finger) + " is out of range for a hand with " +
                               std::to_string(hand.finger_count()) + " fingers");
  }
  if (!(a.voxel_mm > 0.0)) throw StructuralInputError("--voxel must be positive");
  log.info("sampling finger {} with {} samples per joint", a.finger, a.samples);
  const ReachableWorkspace ws = estimate_workspace(hand, a.finger, a.voxel_mm * 1e-3, a.samples);
  write_obj(ws.hull, a.out);
  out << "finger=" << a.finger << "\n"
      << "samples=" << ws.sample_count << "\n"
      << "vertices=" << ws.hull.vertices().size() << "\n"
      << "faces=" << ws.hull.faces().size() << "\n"
      << "volume_m3=" << ws.hull.volume() << "\n";
  return kOk;
}

struct CheckArgs {
  std::string plan, scene;
  bool strict = false;
};

int cmd_check(const CheckArgs& a, std::ostream& out) {
  const Plan plan = load_plan(a.plan);
  const Scene scene = load_scene(a.scene);
  const ValidationReport report = validate_plan(plan, scene, ValidationTolerances::FromParams(plan.params));
  out << report.to_text();
  const bool ok = report.passed() && (!a.strict || report.warnings.empty());
  out << "result=" << (ok ? "pass" : "fail") << "\n";
  return ok ? kOk : kNotReached;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  auto log = make_logger(err);

  CLI::App app{"Finger-gaiting regrasp planner"};
  app.require_subcommand(1);

  PlanArgs plan_args;
  auto* plan = app.add_subcommand("plan", "Plan a regrasp for a scene");
  plan->add_option("--scene", plan_args.scene, "Scene JSON")->required()->check(CLI::ExistingFile);
  plan->add_option("--variant", plan_args.variant, "Desired-grasp cost: sd or svd")
      ->required()
      ->check(CLI::IsMember({"sd", "svd"}, CLI::ignore_case));
  plan->add_option("--out", plan_args.out, "Plan JSON to write")->required();
  plan->add_option("--metrics", plan_args.metrics, "Per-iteration CSV to write")->required();
  plan->add_option("--max-iters", plan_args.max_iters, "Override the iteration cap")->check(CLI::PositiveNumber);
  plan->add_option("--seed-config", plan_args.seed, "JSON with joint_angles replacing the initial configuration")
      ->check(CLI::ExistingFile);

  WorkspaceArgs ws_args;
  auto* workspace = app.add_subcommand("workspace", "Export a finger's reachable workspace hull as OBJ");
  workspace->add_option("--hand", ws_args.hand, "Hand JSON")->required()->check(CLI::ExistingFile);
  workspace->add_option("--finger", ws_args.finger, "Finger index")->required();
  workspace->add_option("--out", ws_args.out, "OBJ to write")->required();
  workspace->add_option("--voxel", ws_args.voxel_mm, "Voxel edge in millimeters")->capture_default_str();
  workspace->add_option("--samples", ws_args.samples, "Samples per joint")->capture_default_str();

  CheckArgs check_args;
  auto* check = app.add_subcommand("check", "Validate a plan against its scene");
  check->add_option("--plan", check_args.plan, "Plan JSON")->required()->check(CLI::ExistingFile);
  check->add_option("--scene", check_args.scene, "Scene JSON")->required()->check(CLI::ExistingFile);
  check->add_flag("--strict", check_args.strict, "Treat warnings as failures");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    const CLI::App* sub = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
    err << sub->help();
    return kInputError;
  }

  try {
    if (plan->parsed()) return cmd_plan(plan_args, out, *log);
    if (workspace->parsed()) return cmd_workspace(ws_args, out, *log);
    return cmd_check(check_args, out);
  } catch (const NumericEvaluationError& e) {
    log->error("numeric failure: {}", e.what());
    return kNumericFailure;
  } catch (const DegenerateGeometryError& e) {
    log->error("degenerate geometry: {}", e.what());
    return kInputError;
  } catch (const Error& e) {
    log->error("{}", e.what());
    return kInputError;
  }
}

}  // namespace regrasp::cli
