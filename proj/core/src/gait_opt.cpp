#include "regrasp/gait_opt.hpp"

#include <cmath>
#include <sstream>

#include "regrasp/errors.hpp"

namespace regrasp {

void GaitParams::validate() const {
  if (!(eta > 0.0) || !(beta > 0.0) || !(surface_tol > 0.0)) {
    throw StructuralInputError("gait params: eta, beta and surface_tol must be positive");
  }
}

double gait_distance_cost(const HandModel& hand, int finger, const Eigen::VectorXd& theta_r, const Vec3& goal) {
  return (goal - fk_fingertip(hand, finger, theta_r).translation()).squaredNorm();
}

namespace {

double proxy_penalty(const std::vector<ProxySphere>& proxies, const ObjectModel& obj, const RigidTransform& pose,
                     double beta) {
  double total = 0.0;
  for (const auto& s : proxies) total += clearance_penalty(signed_distance_object(s.center, obj, pose) - s.radius, beta);
  return total;
}

}  // namespace

double collision_cost(const HandModel& hand, int finger, const Eigen::VectorXd& theta_r, const ObjectModel& obj,
                      const RigidTransform& pose, double beta) {
  return proxy_penalty(fk_link_proxies(hand, finger, theta_r), obj, pose, beta);
}

double stability_constraint(const HandModel& hand, int finger, const Eigen::VectorXd& theta_r,
                            const Eigen::VectorXd& theta_r0) {
  return (fk_fingertip(hand, finger, theta_r0).translation() - fk_fingertip(hand, finger, theta_r).translation())
      .squaredNorm();
}

GaitResult plan_finger_gait(const HandModel& hand, const ObjectModel& obj, const HandState& state, int finger,
                            const Vec3& goal, const GaitParams& params, const NLPOptions& opts) {
  params.validate();
  obj.validate();
  state.joints.check_shape(hand);
  const auto& model = hand.finger(finger);
  const RigidTransform& pose = state.grasp.object_pose;
  if (!(std::abs(signed_distance_object(goal, obj, pose)) <= params.surface_tol)) {
    throw StructuralInputError("gait: goal for finger " + std::to_string(finger) + " is not on the object surface");
  }

  const Eigen::VectorXd theta0 = state.joints.angles[finger];
  const Vec3 tip0 = fk_fingertip(hand, finger, theta0).translation();

  // Every callback needs the same chain; evaluate it once per point.
  struct Snapshot {
    Eigen::VectorXd x;
    Vec3 tip;
    std::vector<ProxySphere> proxies;
  } snap;
  auto at = [&](const Eigen::VectorXd& x) -> const Snapshot& {
    if (snap.x.size() != x.size() || snap.x != x) {
      snap.x = x;
      snap.tip = fk_fingertip(hand, finger, x).translation();
      snap.proxies = fk_link_proxies(hand, finger, x);
    }
    return snap;
  };

  NLPProblem problem;
  problem.dim = model.dof();
  problem.lower.resize(model.dof());
  problem.upper.resize(model.dof());
  for (int j = 0; j < model.dof(); ++j) {
    problem.lower[j] = model.joints[j].limit_min;
    problem.upper[j] = model.joints[j].limit_max;
  }
  problem.objective.value = [&](const Eigen::VectorXd& x) { return (goal - at(x).tip).squaredNorm(); };
  problem.eq_constraints.push_back({[&](const Eigen::VectorXd& x) { return signed_distance_object(at(x).tip, obj, pose); }});
  problem.eq_constraints.push_back(
      {[&](const Eigen::VectorXd& x) { return proxy_penalty(at(x).proxies, obj, pose, params.beta); }});
  const double eta2 = params.eta * params.eta;
  // Normalised so feas_tol bounds the relative overshoot of the step.
  problem.ineq_constraints.push_back({[&](const Eigen::VectorXd& x) { return (at(x).tip - tip0).squaredNorm() / eta2 - 1.0; }});

  GaitResult result;
  result.state = state;
  result.theta_r = theta0;
  result.new_contact = tip0;
  result.cost = (goal - tip0).squaredNorm();
  result.solution = minimize(problem, theta0, opts);

  const auto& sol = result.solution;
  std::ostringstream why;
  if (!sol.succeeded()) {
    why << "solver status " << to_string(sol.status);
  } else {
    const Vec3 tip = fk_fingertip(hand, finger, sol.x).translation();
    const double surface = std::abs(signed_distance_object(tip, obj, pose));
    const double collision = collision_cost(hand, finger, sol.x, obj, pose, params.beta);
    const double step = (tip - tip0).norm();
    const double before = (goal - tip0).norm();
    const double after = (goal - tip).norm();
    if (surface > opts.feas_tol) {
      why << "fingertip " << surface << " m off the surface";
    } else if (collision > opts.feas_tol) {
      why << "link clearance penalty " << collision;
    } else if (step > params.eta + 1e-6) {
      why << "step " << step << " m exceeds eta";
    } else if (after > before + 1e-9) {
      why << "no progress toward the goal";
    } else {
      result.success = true;
      result.theta_r = sol.x;
      result.new_contact = tip;
      result.cost = after * after;
      result.state.joints.angles[finger] = sol.x;
      result.state.grasp.contacts_palm[finger] = tip;
      result.state.grasp.contacts_object[finger] = pose.inverse().apply(tip);
    }
  }
  result.failure_reason = why.str();
  return result;
}

}  // namespace regrasp
