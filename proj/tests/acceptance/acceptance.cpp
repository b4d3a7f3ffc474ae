// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "regrasp/gait_opt.hpp"
#include "regrasp/nlp.hpp"
#include "regrasp/planner.hpp"
#include "regrasp/scene_io.hpp"
#include "regrasp/workspace.hpp"
#include "support.hpp"

namespace regrasp {
namespace {

using Clock = std::chrono::steady_clock;
using Eigen::VectorXd;

double seconds_since(Clock::time_point start) { return std::chrono::duration<double>(Clock::now() - start).count(); }

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(int id, const std::string& name, const std::function<Outcome()>& body) {
  const auto start = Clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double t = seconds_since(start);
  if (!o.pass) ++failures;
  std::printf("criterion %d %s %s: %s (%.1f s)\n", id, o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str(), t);
  std::fflush(stdout);
}

Outcome geometry_oracle() {
  const auto start = Clock::now();
  std::mt19937_64 rng(2024);
  const double radius = 0.05;
  const double spacing = 4e-4;
  std::uniform_real_distribution<double> u(-1.5 * radius, 1.5 * radius);
  double worst = 0.0;
  long pairs = 0;
  for (int h = 0; h < 10; ++h) {
    const ConvexPart hull = test::random_hull(rng, radius, 12 + 4 * h);
    const test::SampledDistanceOracle oracle(hull, spacing);
    for (int i = 0; i < 10000; ++i, ++pairs) {
      const Vec3 p(u(rng), u(rng), u(rng));
      worst = std::max(worst, std::abs(signed_distance_part(p, hull) - oracle(p)));
    }
  }
  const ConvexPart cube = test::unit_cube();
  const std::vector<std::pair<Vec3, double>> cube_cases = {{Vec3(0, 0, 0), -0.5},
                                                           {Vec3(2, 0, 0), 1.5},
                                                           {Vec3(0.2, 0.1, -0.3), -0.2},
                                                           {Vec3(1.5, 1.5, 0), std::sqrt(2.0)},
                                                           {Vec3(1.5, 1.5, 1.5), std::sqrt(3.0)},
                                                           {Vec3(0.5, 0.25, 0), 0.0}};
  double cube_worst = 0.0;
  for (const auto& [p, d] : cube_cases) cube_worst = std::max(cube_worst, std::abs(signed_distance_part(p, cube) - d));
  const double t = seconds_since(start);
  std::ostringstream os;
  os << pairs << " pairs, max |sd - oracle| = " << worst << " m, cube max error = " << cube_worst;
  return {pairs >= 100000 && worst <= 1e-3 && cube_worst <= 1e-9 && t < 60.0, os.str()};
}

Outcome kabsch_optimality() {
  const auto start = Clock::now();
  std::mt19937_64 rng(7);
  std::normal_distribution<double> noise(0.0, 1e-3), n(0.0, 1.0);
  const int sets = 10000, samples_per_set = 100;
  int beaten = 0;
  double worst_exact = 0.0;
  for (int s = 0; s < sets; ++s) {
    std::vector<Vec3> src, dst, clean;
    const RigidTransform truth = test::random_transform(rng);
    for (int i = 0; i < 4; ++i) {
      const Vec3 p = 0.05 * Vec3(n(rng), n(rng), n(rng));
      src.push_back(p);
      clean.push_back(truth.apply(p));
      dst.push_back(clean.back() + Vec3(noise(rng), noise(rng), noise(rng)));
    }
    const auto check = test::kabsch_against_samples(src, dst, samples_per_set, rng);
    if (check.best_sampled_residual < check.returned_residual * (1.0 - 1e-12)) ++beaten;
    const RigidTransform exact = kabsch_transform(std::span<const Vec3>(src), std::span<const Vec3>(clean));
    worst_exact = std::max(worst_exact, registration_residual(exact, src, clean));
  }
  const double t = seconds_since(start);
  std::ostringstream os;
  os << sets << " sets x " << samples_per_set << " transforms = " << static_cast<long>(sets) * samples_per_set
     << " samples, beaten " << beaten << ", worst noise-free residual " << worst_exact;
  return {beaten == 0 && worst_exact < 1e-12 && t < 120.0, os.str()};
}

Outcome gait_oracle() {
  const auto start = Clock::now();
  const auto fx = test::planar_face_fixture(0.4);
  const GaitParams params;
  const NLPOptions opts;
  const double cell = 0.5 * (0.8 / 20.0) * (0.09 + 0.04);
  bool ok = true;
  double worst_gap = 0.0, worst_sd = 0.0, worst_clear = std::numeric_limits<double>::infinity(), worst_disp = 0.0;
  for (double y : {-0.012, -0.005, 0.002, 0.005, 0.009, 0.015}) {
    const Vec3 goal(test::PlanarFaceFixture::kFace, y, 0.0);
    const GaitResult r = plan_finger_gait(fx.hand, fx.object, fx.state, 0, goal, params, opts);
    ok = ok && r.success;
    const auto grid = test::grid_gait_oracle(fx.hand, fx.object, fx.state, 0, goal, params.eta, params.beta, 21, cell);
    ok = ok && grid.feasible_cells > 0;
    worst_gap = std::max(worst_gap, std::abs(std::sqrt(r.cost) - grid.distance));
    worst_sd = std::max(worst_sd, std::abs(signed_distance_object(r.new_contact, fx.object, RigidTransform())));
    for (const auto& s : fk_link_proxies(fx.hand, 0, r.theta_r)) {
      worst_clear = std::min(worst_clear, signed_distance_object(s.center, fx.object, RigidTransform()) - s.radius);
    }
    worst_disp = std::max(worst_disp, (r.new_contact - fx.state.grasp.contacts_palm[0]).norm());
  }
  const double t = seconds_since(start);
  std::ostringstream os;
  os << "max |cost - grid| = " << worst_gap << " m (cell " << cell << "), max |sd| = " << worst_sd
     << ", min clearance = " << worst_clear << ", max displacement = " << worst_disp;
  ok = ok && worst_gap <= cell && worst_sd <= 1e-4 && worst_clear >= params.beta - 1e-4 &&
       worst_disp <= params.eta + 1e-6 && t < 30.0;
  return {ok, os.str()};
}

Outcome solver_contract() {
  bool ok = true;
  std::ostringstream os;
  NLPProblem p1;
  p1.dim = 1;
  p1.lower = VectorXd::Constant(1, 0.0);
  p1.upper = VectorXd::Constant(1, 1.0);
  p1.objective.value = [](const VectorXd& x) { return (x[0] - 2.0) * (x[0] - 2.0); };
  const auto s1 = minimize(p1, test::vec({0.5}));
  ok = ok && std::abs(s1.x[0] - 1.0) <= 1e-5 && s1.status == SolveStatus::kConverged;

  NLPProblem p2;
  p2.dim = 2;
  p2.lower = VectorXd::Constant(2, -10.0);
  p2.upper = VectorXd::Constant(2, 10.0);
  p2.objective.value = [](const VectorXd& x) { return x.squaredNorm(); };
  p2.eq_constraints.push_back({[](const VectorXd& x) { return x[0] + x[1] - 1.0; }});
  NLPOptions tight;
  tight.feas_tol = 1e-8;
  tight.opt_tol = 1e-10;
  const auto s2 = minimize(p2, test::vec({2.0, -3.0}), tight);
  ok = ok && (s2.x - test::vec({0.5, 0.5})).lpNorm<Eigen::Infinity>() <= 1e-5 && std::abs(s2.objective_value - 0.5) <= 1e-5;

  NLPProblem p3;
  p3.dim = 2;
  p3.lower = VectorXd::Constant(2, -2.0);
  p3.upper = VectorXd::Constant(2, 2.0);
  p3.objective.value = [](const VectorXd& x) { return x[0]; };
  p3.ineq_constraints.push_back({[](const VectorXd& x) { return x.squaredNorm() - 1.0; }});
  NLPOptions feas;
  feas.feas_tol = 1e-8;
  const auto s3 = minimize(p3, test::vec({0.5, 0.5}), feas);
  ok = ok && std::abs(s3.x[0] + 1.0) <= 1e-5;
  os << "examples x = " << s1.x[0] << ", (" << s2.x[0] << ", " << s2.x[1] << "), " << s3.x[0];

  std::mt19937_64 rng(42);
  std::normal_distribution<double> n(0.0, 1.0);
  int descents = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const int dim = 2 + trial % 5;
    Eigen::MatrixXd a(dim, dim);
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) a(i, j) = n(rng);
    const Eigen::MatrixXd q = a.transpose() * a + 0.1 * Eigen::MatrixXd::Identity(dim, dim);
    VectorXd c(dim), w(dim);
    for (int i = 0; i < dim; ++i) {
      c[i] = n(rng);
      w[i] = n(rng);
    }
    NLPProblem p;
    p.dim = dim;
    p.lower = VectorXd::Constant(dim, -1.0);
    p.upper = VectorXd::Constant(dim, 1.0);
    p.objective.value = [q, c](const VectorXd& x) { return 0.5 * x.dot(q * x) + c.dot(x); };
    p.ineq_constraints.push_back({[w](const VectorXd& x) { return w.dot(x) - 0.5; }});
    p.ineq_constraints.push_back({[](const VectorXd& x) { return x.squaredNorm() - 0.8; }});
    const VectorXd x0 = VectorXd::Zero(dim);
    const auto sol = minimize(p, x0);
    descents += sol.objective_value <= p.objective.value(x0) + 1e-12;
  }
  os << ", feasible-start descent on " << descents << "/100 quadratics";
  return {ok && descents == 100, os.str()};
}

struct SceneRun {
  std::string scene;
  ReposeVariant variant;
  Plan plan;
  bool valid = false;
  std::string validation;
};

std::vector<SceneRun> run_scenes() {
  std::vector<SceneRun> runs;
  std::vector<std::string> names = test::bundled_scene_names();
  names.push_back("adversarial_far_face");
  for (ReposeVariant v : {ReposeVariant::kSD, ReposeVariant::kSVD}) {
    for (const auto& name : names) {
      Scene scene = load_scene(test::scene_path(name));
      scene.params.repose.variant = v;
      SceneRun r{name, v, plan_regrasp(scene)};
      const auto report = validate_plan(r.plan, scene, ValidationTolerances::FromParams(scene.params));
      r.valid = report.passed();
      r.validation = report.to_text();
      std::printf("  planned %-22s %-3s status=%s iterations=%d max_error_mm=%.3f avg_error_mm=%.3f wall_s=%.2f valid=%d\n",
                  name.c_str(), to_string(v).c_str(), to_string(r.plan.status).c_str(), r.plan.iterations,
                  r.plan.steps.back().max_error * 1e3, r.plan.steps.back().avg_error * 1e3, r.plan.wall_time, r.valid);
      std::fflush(stdout);
      runs.push_back(std::move(r));
    }
  }
  return runs;
}

bool is_adversarial(const SceneRun& r) { return r.scene == "adversarial_far_face"; }

Outcome convergence(const std::vector<SceneRun>& runs) {
  bool ok = true;
  double worst_rise = 0.0, worst_ratio = 0.0;
  for (const auto& r : runs) {
    if (is_adversarial(r)) continue;
    const auto rows = iteration_metrics(r.plan);
    double prev = rows.front().max_error;
    for (const auto& row : rows) {
      if (row.phase == "ingrasp") continue;
      worst_rise = std::max(worst_rise, row.max_error - prev);
      prev = row.max_error;
    }
    if (r.plan.status == PlanStatus::kReached && rows.front().avg_error > 0.0) {
      worst_ratio = std::max(worst_ratio, r.plan.steps.back().avg_error / rows.front().avg_error);
    }
  }
  ok = worst_rise <= 1e-3 && worst_ratio < 0.2;
  std::ostringstream os;
  os << "largest per-iteration max-error rise " << worst_rise * 1e3 << " mm, largest final/initial average ratio "
     << worst_ratio;
  return {ok, os.str()};
}

Outcome end_to_end(const std::vector<SceneRun>& runs) {
  std::map<ReposeVariant, int> reached;
  bool all_valid = true;
  std::string first_invalid;
  for (const auto& r : runs) {
    if (!r.valid && first_invalid.empty()) first_invalid = r.scene + "/" + to_string(r.variant) + ": " + r.validation;
    all_valid = all_valid && r.valid;
    if (is_adversarial(r)) continue;
    if (r.plan.iterations <= 50 && r.plan.steps.back().avg_error <= 0.006) ++reached[r.variant];
  }
  std::ostringstream os;
  os << "sd " << reached[ReposeVariant::kSD] << "/6, svd " << reached[ReposeVariant::kSVD]
     << "/6 within 6 mm; all plans valid = " << (all_valid ? "yes" : "no");
  if (!first_invalid.empty()) os << " (" << first_invalid << ")";
  return {reached[ReposeVariant::kSD] >= 5 && reached[ReposeVariant::kSVD] >= 5 && all_valid, os.str()};
}

Outcome iteration_cap(const std::vector<SceneRun>& runs) {
  bool ok = true;
  std::ostringstream os;
  for (const auto& r : runs) {
    if (!is_adversarial(r)) continue;
    ok = ok && r.plan.status == PlanStatus::kIterationLimit && r.plan.iterations == 50;
    os << to_string(r.variant) << " " << to_string(r.plan.status) << " after " << r.plan.iterations << "; ";
  }
  return {ok, os.str()};
}

Outcome variant_cost(const std::vector<SceneRun>& runs) {
  std::map<ReposeVariant, ReposeStatistics> total;
  for (const auto& r : runs) {
    if (is_adversarial(r)) continue;
    auto& t = total[r.variant];
    t.calls += r.plan.repose_stats.calls;
    t.objective_evals += r.plan.repose_stats.objective_evals;
    t.constraint_evals += r.plan.repose_stats.constraint_evals;
    t.e_des_terms += r.plan.repose_stats.e_des_terms;
  }
  auto per_call = [](const ReposeStatistics& s, std::int64_t v) {
    return s.calls > 0 ? static_cast<double>(v) / s.calls : 0.0;
  };
  const auto& sd = total[ReposeVariant::kSD];
  const auto& svd = total[ReposeVariant::kSVD];
  const double sd_evals = per_call(sd, sd.objective_evals + sd.constraint_evals);
  const double svd_evals = per_call(svd, svd.objective_evals + svd.constraint_evals);
  std::ostringstream os;
  os << "objective+constraint evaluations per call: sd " << sd_evals << " (" << sd.calls << " calls), svd "
     << svd_evals << " (" << svd.calls << " calls); desired-grasp terms per call: sd "
     << per_call(sd, sd.e_des_terms) << ", svd " << per_call(svd, svd.e_des_terms);
  return {sd.calls > 0 && svd.calls > 0 && svd_evals < sd_evals, os.str()};
}

Outcome workspace_containment() {
  const HandModel hand = load_hand(test::data_dir() / "hands" / "default_hand.json");
  std::mt19937_64 rng(11);
  double worst = -std::numeric_limits<double>::infinity();
  double voxel = 0.0;
  for (int f = 0; f < hand.finger_count(); ++f) {
    const ReachableWorkspace ws = estimate_workspace(hand, f);
    voxel = ws.voxel_size;
    for (int i = 0; i < 10000; ++i) {
      const Vec3 tip = fk_fingertip(hand, f, test::random_in_limits(hand.finger(f), rng)).translation();
      worst = std::max(worst, signed_distance_part(tip, ws.hull));
    }
  }
  std::ostringstream os;
  os << hand.finger_count() << " fingers x 10000 samples, largest signed distance outside the hull " << worst
     << " m (voxel " << voxel << " m)";
  return {worst <= voxel, os.str()};
}

Outcome runtime(const std::vector<SceneRun>& runs, double suite_seconds) {
  double slowest = 0.0;
  std::string which;
  for (const auto& r : runs) {
    if (r.plan.wall_time > slowest) {
      slowest = r.plan.wall_time;
      which = r.scene + "/" + to_string(r.variant);
    }
  }
  std::ostringstream os;
  os << "slowest plan " << which << " " << slowest << " s, suite " << suite_seconds << " s";
  return {slowest < 120.0 && suite_seconds < 900.0, os.str()};
}

}  // namespace
}  // namespace regrasp

int main() {
  using namespace regrasp;
  const auto start = Clock::now();
  report(1, "geometry-oracle", geometry_oracle);
  report(2, "kabsch-optimality", kabsch_optimality);
  report(3, "gait-oracle", gait_oracle);
  report(4, "solver-contract", solver_contract);
  const auto runs = run_scenes();
  report(5, "convergence", [&] { return convergence(runs); });
  report(6, "end-to-end", [&] { return end_to_end(runs); });
  report(7, "iteration-cap", [&] { return iteration_cap(runs); });
  report(8, "variant-cost", [&] { return variant_cost(runs); });
  report(9, "workspace-containment", workspace_containment);
  report(10, "runtime", [&] { return runtime(runs, seconds_since(start)); });
  std::printf("acceptance: %d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
