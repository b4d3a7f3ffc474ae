#include <cmath>
#include <limits>
#include <sstream>

#include "regrasp/errors.hpp"
#include "regrasp/planner.hpp"

namespace regrasp {

ValidationTolerances ValidationTolerances::FromParams(const PlannerParams& params) {
  ValidationTolerances tol;
  tol.surface_tol = params.gait.surface_tol;
  tol.feas_tol = params.solver.feas_tol;
  tol.beta = params.gait.beta;
  tol.eta = params.gait.eta;
  tol.slip_max = params.repose.slip_max;
  return tol;
}

std::string ValidationReport::to_text() const {
  std::ostringstream os;
  for (const auto& v : violations) os << "violation step=" << v.step << " kind=" << v.kind << " " << v.detail << "\n";
  for (const auto& w : warnings) os << "warning step=" << w.step << " kind=" << w.kind << " " << w.detail << "\n";
  os << "hard_violations=" << violations.size() << " warnings=" << warnings.size() << "\n";
  return os.str();
}

namespace {

double min_clearance(const std::vector<ProxySphere>& proxies, const ObjectModel& obj, const RigidTransform& pose) {
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& s : proxies) worst = std::min(worst, signed_distance_object(s.center, obj, pose) - s.radius);
  return worst;
}

}  // namespace

ValidationReport validate_plan(const Plan& plan, const Scene& scene, const ValidationTolerances& tol) {
  if (plan.scene != scene.name) {
    throw StructuralInputError("plan belongs to scene '" + plan.scene + "', not '" + scene.name + "'");
  }
  const HandModel& hand = scene.hand;
  const ObjectModel& obj = scene.object;
  const int m = hand.finger_count();
  for (const auto& step : plan.steps) {
    step.joints.check_shape(hand);
    if (static_cast<int>(step.grasp.contacts_palm.size()) != m ||
        static_cast<int>(step.grasp.contacts_object.size()) != m) {
      throw StructuralInputError("plan step contact lists do not match the hand's finger count");
    }
  }

  ValidationReport report;
  auto fail = [&](int step, const std::string& kind, const std::string& detail) {
    report.violations.push_back({step, kind, detail});
  };
  auto warn = [&](int step, const std::string& kind, const std::string& detail) {
    report.warnings.push_back({step, kind, detail});
  };

  if (plan.steps.empty()) {
    fail(0, "empty-plan", "plan has no steps");
    return report;
  }
  if (plan.iterations > scene.params.max_iterations) {
    fail(0, "iteration-cap", "plan ran " + std::to_string(plan.iterations) + " iterations");
  }
  if (plan.steps.front().kind != StepKind::kInitial || !(plan.steps.front().joints == scene.initial_joints)) {
    fail(0, "initial-mismatch", "first step does not reproduce the scene's initial configuration");
  }

  for (std::size_t k = 0; k < plan.steps.size(); ++k) {
    const int idx = static_cast<int>(k);
    const PlanStep& step = plan.steps[k];
    const RigidTransform& pose = step.grasp.object_pose;

    for (int f = 0; f < m; ++f) {
      const auto& joints = hand.finger(f).joints;
      for (std::size_t j = 0; j < joints.size(); ++j) {
        const double a = step.joints.angles[f][static_cast<Eigen::Index>(j)];
        if (!(a >= joints[j].limit_min - 1e-9 && a <= joints[j].limit_max + 1e-9)) {
          std::ostringstream os;
          os << "finger=" << f << " joint=" << j << " angle=" << a << " limits=[" << joints[j].limit_min << ","
             << joints[j].limit_max << "]";
          fail(idx, "joint-limit", os.str());
        }
      }
    }

    std::vector<std::vector<ProxySphere>> proxies(m);
    for (int f = 0; f < m; ++f) {
      const Vec3 tip = fk_fingertip(hand, f, step.joints.angles[f]).translation();
      const double sd = signed_distance_object(tip, obj, pose);
      if (!(std::abs(sd) <= tol.surface_tol)) {
        std::ostringstream os;
        os << "finger=" << f << " signed_distance=" << sd;
        fail(idx, "off-surface", os.str());
      }
      if (!((step.grasp.contacts_palm[f] - tip).norm() <= tol.surface_tol)) {
        fail(idx, "contact-mismatch", "finger=" + std::to_string(f) + " recorded contact is not at the fingertip");
      }
      if (!((step.grasp.contacts_palm[f] - pose.apply(step.grasp.contacts_object[f])).norm() <= tol.surface_tol)) {
        fail(idx, "frame-mismatch", "finger=" + std::to_string(f) + " palm and object frame contacts disagree");
      }
      proxies[f] = fk_link_proxies(hand, f, step.joints.angles[f]);
      const double clearance = min_clearance(proxies[f], obj, pose);
      if (!(clearance >= tol.beta - tol.feas_tol)) {
        std::ostringstream os;
        os << "finger=" << f << " clearance=" << clearance;
        fail(idx, "clearance", os.str());
      }
    }

    auto overlapping = [&](int f, int g) {
      for (const auto& a : proxies[f]) {
        for (const auto& b : proxies[g]) {
          if ((a.center - b.center).norm() < a.radius + b.radius) return true;
        }
      }
      return false;
    };
    for (int f = 0; f < m; ++f) {
      for (int g = f + 1; g < m; ++g) {
        if (overlapping(f, g)) warn(idx, "finger-overlap", "fingers=" + std::to_string(f) + "," + std::to_string(g));
      }
    }

    const double max_err = max_point_error(step.grasp.contacts_object, scene.goal_contacts_object);
    const double avg_err = average_point_error(step.grasp.contacts_object, scene.goal_contacts_object);
    if (!(std::abs(max_err - step.max_error) <= 1e-12) || !(std::abs(avg_err - step.avg_error) <= 1e-12)) {
      std::ostringstream os;
      os << "recorded max/avg " << step.max_error << "/" << step.avg_error << " recomputed " << max_err << "/"
         << avg_err;
      fail(idx, "error-ledger", os.str());
    }

    if (k == 0) continue;
    const PlanStep& prev = plan.steps[k - 1];
    if (step.kind == StepKind::kInitial) fail(idx, "step-kind", "initial step after the start of the plan");

    if (step.kind == StepKind::kGait) {
      if (!step.finger || *step.finger < 0 || *step.finger >= m) {
        fail(idx, "step-kind", "gait step without a valid finger");
        continue;
      }
      const int r = *step.finger;
      for (int f = 0; f < m; ++f) {
        if (f != r && step.joints.angles[f] != prev.joints.angles[f]) {
          fail(idx, "static-finger-moved", "finger=" + std::to_string(f));
        }
      }
      if (!(step.grasp.object_pose == prev.grasp.object_pose)) fail(idx, "object-moved", "object pose changed during a gait");

      const Eigen::VectorXd& from = prev.joints.angles[r];
      const Eigen::VectorXd& to = step.joints.angles[r];
      const double displacement = (fk_fingertip(hand, r, to).translation() - fk_fingertip(hand, r, from).translation()).norm();
      if (!(displacement <= tol.eta + tol.feas_tol)) {
        std::ostringstream os;
        os << "finger=" << r << " displacement=" << displacement;
        fail(idx, "stability", os.str());
      }
      if (!(step.max_error <= prev.max_error + 1e-9)) {
        std::ostringstream os;
        os << "max error rose from " << prev.max_error << " to " << step.max_error;
        fail(idx, "error-increase", os.str());
      }

      for (int s = 1; s <= tol.interpolation_samples; ++s) {
        const double t = static_cast<double>(s) / (tol.interpolation_samples + 1);
        const Eigen::VectorXd theta = (1.0 - t) * from + t * to;
        const double clearance = min_clearance(fk_link_proxies(hand, r, theta), obj, pose);
        if (clearance < tol.beta - tol.feas_tol) {
          std::ostringstream os;
          os << "finger=" << r << " t=" << t << " clearance=" << clearance;
          warn(idx, "interpolated-clearance", os.str());
          break;
        }
      }
    } else {
      if (step.finger) fail(idx, "step-kind", to_string(step.kind) + " step names a finger");
      if (!(step.max_error <= prev.max_error + tol.slip_max)) {
        std::ostringstream os;
        os << "max error rose from " << prev.max_error << " to " << step.max_error << " during " << to_string(step.kind);
        fail(idx, "error-increase", os.str());
      }
    }
  }
  return report;
}

}  // namespace regrasp
