#include "regrasp/planner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

#include "regrasp/errors.hpp"

namespace regrasp {

void PlannerParams::validate() const {
  if (!(zeta > 0.0)) throw StructuralInputError("planner params: zeta must be positive");
  if (max_iterations < 1) throw StructuralInputError("planner params: max_iterations must be at least 1");
  if (!(stall_epsilon >= 0.0)) throw StructuralInputError("planner params: stall_epsilon must be non-negative");
  if (!(workspace_voxel > 0.0) || workspace_samples < 2) {
    throw StructuralInputError("planner params: workspace voxel must be positive and samples at least 2");
  }
  gait.validate();
  repose.validate();
}

bool PlannerParams::operator==(const PlannerParams& o) const {
  return zeta == o.zeta && max_iterations == o.max_iterations && stall_epsilon == o.stall_epsilon &&
         gait.eta == o.gait.eta && gait.beta == o.gait.beta && gait.surface_tol == o.gait.surface_tol &&
         repose.k1 == o.repose.k1 && repose.k2 == o.repose.k2 && repose.variant == o.repose.variant &&
         repose.beta == o.repose.beta && repose.lambda_rot == o.repose.lambda_rot &&
         repose.slip_max == o.repose.slip_max && repose.surface_tol == o.repose.surface_tol &&
         workspace_voxel == o.workspace_voxel && workspace_samples == o.workspace_samples &&
         solver.max_outer == o.solver.max_outer && solver.max_inner == o.solver.max_inner &&
         solver.feas_tol == o.solver.feas_tol && solver.opt_tol == o.solver.opt_tol;
}

HandState Scene::initial_state() const {
  return HandState{Grasp::FromJoints(hand, initial_joints, initial_pose), initial_joints};
}

void Scene::validate() const {
  params.validate();
  object.validate();
  initial_joints.check_shape(hand);
  if (!initial_joints.within_limits(hand)) {
    throw StructuralInputError("scene '" + name + "': initial joint configuration violates joint limits");
  }
  if (static_cast<int>(goal_contacts_object.size()) != hand.finger_count()) {
    throw StructuralInputError("scene '" + name + "': expected one goal contact per finger");
  }
  const double tol = params.gait.surface_tol;
  const Grasp grasp = initial_state().grasp;
  for (std::size_t i = 0; i < grasp.contacts_palm.size(); ++i) {
    const double sd = signed_distance_object(grasp.contacts_palm[i], object, initial_pose);
    if (!(std::abs(sd) <= tol)) {
      std::ostringstream os;
      os << "scene '" << name << "': initial fingertip " << i << " is " << sd << " m from the object surface";
      throw StructuralInputError(os.str());
    }
  }
  for (std::size_t i = 0; i < goal_contacts_object.size(); ++i) {
    const double sd = signed_distance_object(goal_contacts_object[i], object, RigidTransform());
    if (!(std::abs(sd) <= tol)) {
      std::ostringstream os;
      os << "scene '" << name << "': goal contact " << i << " is " << sd << " m from the object surface";
      throw StructuralInputError(os.str());
    }
  }
}

std::string to_string(StepKind kind) {
  switch (kind) {
    case StepKind::kInitial:
      return "initial";
    case StepKind::kGait:
      return "gait";
    case StepKind::kRepose:
      return "repose";
    case StepKind::kInGrasp:
      return "ingrasp";
  }
  return "initial";
}

StepKind step_kind_from_string(const std::string& name) {
  for (auto k : {StepKind::kInitial, StepKind::kGait, StepKind::kRepose, StepKind::kInGrasp}) {
    if (to_string(k) == name) return k;
  }
  throw StructuralInputError("unknown step kind '" + name + "'");
}

std::string to_string(PlanStatus status) {
  switch (status) {
    case PlanStatus::kReached:
      return "reached";
    case PlanStatus::kIterationLimit:
      return "iteration-limit";
    case PlanStatus::kStalled:
      return "stalled";
  }
  return "iteration-limit";
}

PlanStatus plan_status_from_string(const std::string& name) {
  for (auto s : {PlanStatus::kReached, PlanStatus::kIterationLimit, PlanStatus::kStalled}) {
    if (to_string(s) == name) return s;
  }
  throw StructuralInputError("unknown plan status '" + name + "'");
}

bool Plan::operator==(const Plan& o) const {
  return scene == o.scene && params == o.params && steps == o.steps && status == o.status &&
         iterations == o.iterations && wall_time == o.wall_time && repose_stats == o.repose_stats;
}

double max_point_error(std::span<const Vec3> contacts, std::span<const Vec3> goals) {
  if (contacts.size() != goals.size()) throw StructuralInputError("point error: contact and goal counts differ");
  double worst = 0.0;
  for (std::size_t i = 0; i < contacts.size(); ++i) worst = std::max(worst, (contacts[i] - goals[i]).norm());
  return worst;
}

double average_point_error(std::span<const Vec3> contacts, std::span<const Vec3> goals) {
  if (contacts.size() != goals.size()) throw StructuralInputError("point error: contact and goal counts differ");
  if (contacts.empty()) return 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < contacts.size(); ++i) total += (contacts[i] - goals[i]).norm();
  return total / static_cast<double>(contacts.size());
}

std::vector<int> select_gait_pattern(const Grasp& grasp, std::span<const Vec3> goals_palm, const HandModel& hand) {
  std::vector<int> fingers;
  for (const char* role : {"index", "middle", "ring", "thumb"}) {
    const auto idx = hand.role(role);
    if (!idx) throw ConfigurationError(std::string("gait pattern: hand has no '") + role + "' finger");
    fingers.push_back(*idx);
  }
  const int index = fingers[0];
  const int middle = fingers[1];
  if (static_cast<std::size_t>(std::max(index, middle)) >= goals_palm.size() ||
      static_cast<std::size_t>(std::max(index, middle)) >= grasp.contacts_palm.size()) {
    throw StructuralInputError("gait pattern: goal or contact list too short");
  }
  const Vec3& goal_index = goals_palm[index];
  if ((goal_index - grasp.contacts_palm[middle]).norm() > (goal_index - grasp.contacts_palm[index]).norm()) {
    return fingers;
  }
  std::reverse(fingers.begin(), fingers.end());
  return fingers;
}

std::vector<IterationMetrics> iteration_metrics(const Plan& plan) {
  std::vector<IterationMetrics> rows;
  if (plan.steps.empty()) return rows;
  const auto& first = plan.steps.front();
  rows.push_back({0, first.max_error, first.avg_error, "initial"});
  for (int it = 1; it <= plan.iterations; ++it) {
    const PlanStep* last = nullptr;
    for (const auto& step : plan.steps) {
      if (step.iteration == it && (step.kind == StepKind::kGait || step.kind == StepKind::kRepose)) last = &step;
    }
    if (last) rows.push_back({it, last->max_error, last->avg_error, to_string(last->kind)});
  }
  const auto& final_step = plan.steps.back();
  if (final_step.kind == StepKind::kInGrasp) {
    rows.push_back({plan.iterations, final_step.max_error, final_step.avg_error, "ingrasp"});
  }
  return rows;
}

Plan plan_regrasp(const Scene& scene) {
  const auto started = std::chrono::steady_clock::now();
  scene.validate();
  const PlannerParams& p = scene.params;
  const HandModel& hand = scene.hand;
  const auto& goals = scene.goal_contacts_object;

  Plan plan;
  plan.scene = scene.name;
  plan.params = p;

  HandState state = scene.initial_state();
  auto record = [&](StepKind kind, std::optional<int> finger, bool accepted, SolveStatus status, int iteration) {
    PlanStep step;
    step.kind = kind;
    step.finger = finger;
    step.joints = state.joints;
    step.grasp = state.grasp;
    step.max_error = max_point_error(state.grasp.contacts_object, goals);
    step.avg_error = average_point_error(state.grasp.contacts_object, goals);
    step.solver_status = status;
    step.accepted = accepted;
    step.iteration = iteration;
    plan.steps.push_back(std::move(step));
  };
  auto goals_in_palm = [&] {
    std::vector<Vec3> out;
    for (const auto& g : goals) out.push_back(state.grasp.object_pose.apply(g));
    return out;
  };

  std::vector<ReachableWorkspace> workspaces;
  if (p.repose.variant == ReposeVariant::kSD) {
    for (int f = 0; f < hand.finger_count(); ++f) {
      workspaces.push_back(estimate_workspace(hand, f, p.workspace_voxel, p.workspace_samples));
    }
  }

  record(StepKind::kInitial, std::nullopt, true, SolveStatus::kConverged, 0);
  double err = plan.steps.back().max_error;

  std::vector<int> pattern;
  if (hand.roles().empty()) {
    for (int f = 0; f < hand.finger_count(); ++f) pattern.push_back(f);
  } else {
    const auto goals_palm = goals_in_palm();
    pattern = select_gait_pattern(state.grasp, goals_palm, hand);
  }

  std::vector<double> history{err};
  bool stalled = false;
  int n = 0;
  while (err > p.zeta && n < p.max_iterations) {
    const int iteration = n + 1;
    for (int finger : pattern) {
      const Vec3 goal = state.grasp.object_pose.apply(goals[finger]);
      bool accepted = false;
      SolveStatus status = SolveStatus::kNumericFailure;
      try {
        GaitResult gait = plan_finger_gait(hand, scene.object, state, finger, goal, p.gait, p.solver);
        status = gait.solution.status;
        if (gait.success) {
          state = std::move(gait.state);
          accepted = true;
        }
      } catch (const DegenerateGeometryError&) {
      } catch (const NumericEvaluationError&) {
      }
      record(StepKind::kGait, finger, accepted, status, iteration);
    }
    err = plan.steps.back().max_error;

    if (err > p.zeta) {
      bool accepted = false;
      SolveStatus status = SolveStatus::kNumericFailure;
      try {
        ReposeResult repose = repose_object(hand, scene.object, state, goals, workspaces, p.repose, p.solver);
        status = repose.solution.status;
        ++plan.repose_stats.calls;
        plan.repose_stats.objective_evals += repose.counters.objective_evals;
        plan.repose_stats.constraint_evals += repose.counters.constraint_evals;
        plan.repose_stats.e_des_terms += repose.counters.e_des_terms;
        if (repose.success) {
          state = std::move(repose.state);
          accepted = true;
        }
      } catch (const DegenerateGeometryError&) {
      } catch (const NumericEvaluationError&) {
      }
      record(StepKind::kRepose, std::nullopt, accepted, status, iteration);
      err = plan.steps.back().max_error;
    }
    n = iteration;

    history.push_back(err);
    if (p.stall_epsilon > 0.0 && history.size() >= 4 &&
        history[history.size() - 4] - history.back() < p.stall_epsilon) {
      stalled = true;
      break;
    }
  }

  {
    bool accepted = false;
    SolveStatus status = SolveStatus::kNumericFailure;
    try {
      ReposeResult final_move = in_grasp_to_pose(hand, scene.object, state, scene.goal_pose, p.repose, p.solver);
      status = final_move.solution.status;
      if (final_move.success) {
        state = std::move(final_move.state);
        accepted = true;
      }
    } catch (const DegenerateGeometryError&) {
    } catch (const NumericEvaluationError&) {
    }
    record(StepKind::kInGrasp, std::nullopt, accepted, status, n);
  }

  plan.iterations = n;
  const double final_err = plan.steps.back().max_error;
  if (final_err <= p.zeta) {
    plan.status = PlanStatus::kReached;
  } else if (stalled) {
    plan.status = PlanStatus::kStalled;
  } else {
    plan.status = PlanStatus::kIterationLimit;
  }
  plan.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return plan;
}

}  // namespace regrasp
