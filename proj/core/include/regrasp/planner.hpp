#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "regrasp/gait_opt.hpp"
#include "regrasp/grasp.hpp"
#include "regrasp/repose_opt.hpp"

namespace regrasp {

struct PlannerParams {
  double zeta = 0.006;  ///< termination threshold on the max contact error (m)
  int max_iterations = 50;
  /// Early exit when the max error drops by less than this over three
  /// consecutive iterations. Zero disables the detector.
  double stall_epsilon = 0.0;
  GaitParams gait;
  ReposeParams repose;
  double workspace_voxel = kDefaultWorkspaceVoxel;
  int workspace_samples = kDefaultWorkspaceSamples;
  NLPOptions solver;

  void validate() const;
  bool operator==(const PlannerParams& other) const;
};

/// Everything the planner needs: hand, object, initial state and goals.
struct Scene {
  std::string name;
  HandModel hand;
  ObjectModel object;
  JointConfig initial_joints;
  RigidTransform initial_pose;
  std::vector<Vec3> goal_contacts_object;
  RigidTransform goal_pose;
  PlannerParams params;

  HandState initial_state() const;
  /// Throws StructuralInputError when the initial grasp or the goal
  /// contacts break the grasp invariants.
  void validate() const;
};

enum class StepKind { kInitial, kGait, kRepose, kInGrasp };
std::string to_string(StepKind kind);
StepKind step_kind_from_string(const std::string& name);

struct PlanStep {
  StepKind kind = StepKind::kInitial;
  std::optional<int> finger;
  JointConfig joints;
  Grasp grasp;
  double max_error = 0.0;
  double avg_error = 0.0;
  SolveStatus solver_status = SolveStatus::kConverged;
  bool accepted = true;  ///< false when the sub-solve failed and the state was kept
  int iteration = 0;

  bool operator==(const PlanStep& other) const = default;
};

enum class PlanStatus { kReached, kIterationLimit, kStalled };
std::string to_string(PlanStatus status);
PlanStatus plan_status_from_string(const std::string& name);

/// Per-iteration error record; phase is initial, gait, repose or ingrasp.
struct IterationMetrics {
  int iteration = 0;
  double max_error = 0.0;
  double avg_error = 0.0;
  std::string phase;

  bool operator==(const IterationMetrics& other) const = default;
};

/// Work counters for all reposing calls of one plan (terminal step excluded).
struct ReposeStatistics {
  int calls = 0;
  std::int64_t objective_evals = 0;
  std::int64_t constraint_evals = 0;
  std::int64_t e_des_terms = 0;

  bool operator==(const ReposeStatistics& other) const = default;
};

struct Plan {
  std::string scene;
  PlannerParams params;
  std::vector<PlanStep> steps;
  PlanStatus status = PlanStatus::kIterationLimit;
  int iterations = 0;
  double wall_time = 0.0;
  ReposeStatistics repose_stats;

  bool operator==(const Plan& other) const;
};

/// max_r |contact_r - goal_r|
double max_point_error(std::span<const Vec3> contacts, std::span<const Vec3> goals);
/// mean_r |contact_r - goal_r|
double average_point_error(std::span<const Vec3> contacts, std::span<const Vec3> goals);

/// Fixed gait order: {index, middle, ring, thumb} when the index goal is
/// strictly farther from the middle fingertip than from the index fingertip,
/// the reverse otherwise. `goals_palm` and the grasp share the palm frame.
/// Throws ConfigurationError when a role is missing.
std::vector<int> select_gait_pattern(const Grasp& grasp, std::span<const Vec3> goals_palm, const HandModel& hand);

/// One row for the initial state, one per planner iteration (the state
/// after its last step), and one for the terminal in-grasp step.
std::vector<IterationMetrics> iteration_metrics(const Plan& plan);

/// Alternates finger gaits and object reposing until every contact is
/// within zeta of its goal or the iteration cap is hit, then moves the
/// object toward the goal pose.
Plan plan_regrasp(const Scene& scene);

struct ValidationTolerances {
  double surface_tol = 1e-3;
  double feas_tol = 1e-4;
  double beta = 0.001;
  double eta = 0.01;
  double slip_max = 0.003;
  int interpolation_samples = 10;

  static ValidationTolerances FromParams(const PlannerParams& params);
};

struct Violation {
  int step = 0;
  std::string kind;
  std::string detail;
};

struct ValidationReport {
  std::vector<Violation> violations;  ///< hard failures
  std::vector<Violation> warnings;

  bool passed() const { return violations.empty(); }
  std::string to_text() const;
};

/// Independent re-check of every plan step against the scene. Throws
/// StructuralInputError when the plan does not belong to the scene.
ValidationReport validate_plan(const Plan& plan, const Scene& scene, const ValidationTolerances& tol);

}  // namespace regrasp
