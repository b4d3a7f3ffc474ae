#include "regrasp/repose_opt.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <functional>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "regrasp/errors.hpp"

namespace regrasp {

std::string to_string(ReposeVariant variant) { return variant == ReposeVariant::kSD ? "sd" : "svd"; }

ReposeVariant repose_variant_from_string(const std::string& name) {
  std::string lower = name;
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  if (lower == "sd") return ReposeVariant::kSD;
  if (lower == "svd") return ReposeVariant::kSVD;
  throw StructuralInputError("unknown repose variant '" + name + "' (expected sd or svd)");
}

void ReposeParams::validate() const {
  if (!(k1 >= 0.0) || !(k2 >= 0.0)) throw StructuralInputError("repose params: k1 and k2 must be non-negative");
  if (!(beta > 0.0) || !(lambda_rot >= 0.0) || !(slip_max > 0.0) || !(surface_tol > 0.0)) {
    throw StructuralInputError("repose params: beta, slip_max and surface_tol must be positive");
  }
}

// ---------------------------------------------------------------------------
// Registration

RigidTransform kabsch_transform(std::span<const Vec3> src, std::span<const Vec3> dst) {
  if (src.size() != dst.size()) throw StructuralInputError("kabsch: point lists differ in length");
  if (src.size() < 3) throw StructuralInputError("kabsch: needs at least 3 correspondences");

  Vec3 cs = Vec3::Zero();
  Vec3 cd = Vec3::Zero();
  for (std::size_t i = 0; i < src.size(); ++i) {
    cs += src[i];
    cd += dst[i];
  }
  cs /= static_cast<double>(src.size());
  cd /= static_cast<double>(src.size());

  Mat3 spread = Mat3::Zero();
  Mat3 cov = Mat3::Zero();
  double extent = 0.0;
  for (std::size_t i = 0; i < src.size(); ++i) {
    const Vec3 a = src[i] - cs;
    spread += a * a.transpose();
    cov += a * (dst[i] - cd).transpose();
    extent = std::max(extent, a.norm());
  }
  // Collinear sources leave a free rotation about their common line.
  const Eigen::SelfAdjointEigenSolver<Mat3> eig(spread);
  if (!(extent > 0.0) || !(eig.eigenvalues()[1] > 1e-20 + 1e-12 * extent * extent)) {
    throw DegenerateGeometryError("kabsch: source points are collinear");
  }

  const Eigen::JacobiSVD<Mat3> svd(cov, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Mat3 u = svd.matrixU();
  const Mat3 v = svd.matrixV();
  Mat3 d = Mat3::Identity();
  if ((v * u.transpose()).determinant() < 0.0) d(2, 2) = -1.0;
  const Mat3 r = v * d * u.transpose();
  return RigidTransform(Eigen::Quaterniond(r), cd - r * cs);
}

double registration_residual(const RigidTransform& t, std::span<const Vec3> src, std::span<const Vec3> dst) {
  if (src.size() != dst.size()) throw StructuralInputError("residual: point lists differ in length");
  double total = 0.0;
  for (std::size_t i = 0; i < src.size(); ++i) total += (t.apply(src[i]) - dst[i]).squaredNorm();
  return total;
}

double e_des_sd(std::span<const ReachableWorkspace> workspaces, std::span<const Vec3> goals_palm) {
  if (workspaces.size() != goals_palm.size()) throw StructuralInputError("e_des_sd: one workspace per goal required");
  double total = 0.0;
  for (std::size_t r = 0; r < goals_palm.size(); ++r) {
    total += std::max(0.0, workspace_signed_distance(goals_palm[r], workspaces[r]));
  }
  return total;
}

RigidTransform auxiliary_goal_pose(std::span<const Vec3> current_contacts_object,
                                   std::span<const Vec3> goal_contacts_object, const RigidTransform& current_pose) {
  return current_pose * kabsch_transform(goal_contacts_object, current_contacts_object);
}

double pose_error(const RigidTransform& pose, const RigidTransform& target, double lambda_rot) {
  const double angle = rotation_angle(pose.rotation(), target.rotation());
  return (pose.translation() - target.translation()).squaredNorm() + lambda_rot * angle * angle;
}

// ---------------------------------------------------------------------------
// Relaxed rigidity

namespace {

RigidityCosts rigidity(std::span<const RigidTransform> tips, std::span<const RigidTransform> tips0,
                       std::int64_t* kabsch_counter) {
  if (tips.size() != tips0.size()) throw StructuralInputError("rigidity: fingertip lists differ in length");
  const std::size_t m = tips.size();
  RigidityCosts out;
  std::vector<Vec3> p(m), p0(m);
  for (std::size_t r = 0; r < m; ++r) {
    p[r] = tips[r].translation();
    p0[r] = tips0[r].translation();
  }
  for (std::size_t r = 0; r < m; ++r) {
    for (std::size_t s = r + 1; s < m; ++s) {
      const double change = (p[r] - p[s]).norm() - (p0[r] - p0[s]).norm();
      out.position += change * change;
    }
  }
  if (m < 3) return out;  // grasp frame undefined for fewer than three tips
  const Mat3 grasp = kabsch_transform(p0, p).rotation();
  if (kabsch_counter) ++*kabsch_counter;
  for (std::size_t r = 0; r < m; ++r) {
    const Mat3 before = tips0[r].rotation().transpose();
    const Mat3 after = tips[r].rotation().transpose() * grasp;
    const double angle = rotation_angle(before, after);
    out.orientation += angle * angle;
  }
  return out;
}

using EDesFunction = std::function<double(const RigidTransform& pose, ReposeCounters& counters)>;

struct Snapshot {
  Eigen::VectorXd x;
  std::vector<RigidTransform> tips;
  std::vector<Vec3> tip_positions;
  RigidTransform pose;
  std::vector<ProxySphere> proxies;
};

ReposeResult solve_repose(const HandModel& hand, const ObjectModel& obj, const HandState& state,
                          const ReposeParams& params, const NLPOptions& opts, const EDesFunction& e_des) {
  params.validate();
  obj.validate();
  state.joints.check_shape(hand);
  const int m = hand.finger_count();
  if (m < 3) throw DegenerateGeometryError("repose: object pose tracking needs at least 3 fingers");
  const auto& contacts_object = state.grasp.contacts_object;
  if (static_cast<int>(contacts_object.size()) != m) throw StructuralInputError("repose: one contact per finger required");

  ReposeResult result;
  result.state = state;
  const std::vector<RigidTransform> tips0 = fk_all_fingertips(hand, state.joints);

  Snapshot snap;
  auto at = [&](const Eigen::VectorXd& x) -> const Snapshot& {
    if (snap.x.size() != x.size() || snap.x != x) {
      snap.x = x;
      const JointConfig config = JointConfig::Unflatten(hand, x);
      snap.tips = fk_all_fingertips(hand, config);
      snap.tip_positions.resize(snap.tips.size());
      for (std::size_t r = 0; r < snap.tips.size(); ++r) snap.tip_positions[r] = snap.tips[r].translation();
      // Fixed-contact assumption: the object follows the fingertips.
      snap.pose = kabsch_transform(contacts_object, snap.tip_positions);
      ++result.counters.kabsch_solves;
      snap.proxies.clear();
      for (int f = 0; f < m; ++f) {
        auto proxies = fk_link_proxies(hand, f, config.angles[f]);
        snap.proxies.insert(snap.proxies.end(), proxies.begin(), proxies.end());
      }
    }
    return snap;
  };

  NLPProblem problem;
  problem.dim = hand.total_dof();
  problem.lower.resize(problem.dim);
  problem.upper.resize(problem.dim);
  {
    int k = 0;
    for (const auto& finger : hand.fingers()) {
      for (const auto& joint : finger.joints) {
        problem.lower[k] = joint.limit_min;
        problem.upper[k] = joint.limit_max;
        ++k;
      }
    }
  }
  problem.objective.value = [&](const Eigen::VectorXd& x) {
    const Snapshot& s = at(x);
    ++result.counters.objective_evals;
    const RigidityCosts rigid = rigidity(s.tips, tips0, &result.counters.kabsch_solves);
    return e_des(s.pose, result.counters) + params.k1 * rigid.position + params.k2 * rigid.orientation;
  };
  problem.eq_constraints.push_back({[&](const Eigen::VectorXd& x) {
    const Snapshot& s = at(x);
    ++result.counters.constraint_evals;
    double total = 0.0;
    for (const auto& p : s.proxies) {
      total += clearance_penalty(signed_distance_object(p.center, obj, s.pose) - p.radius, params.beta);
    }
    return total;
  }});
  // Fingertips stay on the surface of the object they carry.
  for (int f = 0; f < m; ++f) {
    problem.eq_constraints.push_back({[&, f](const Eigen::VectorXd& x) {
      const Snapshot& s = at(x);
      ++result.counters.constraint_evals;
      return signed_distance_object(s.tip_positions[f], obj, s.pose);
    }});
  }

  const Eigen::VectorXd x0 = state.joints.flatten();
  ReposeCounters scratch;
  result.e_des_before = e_des(at(x0).pose, scratch);
  result.solution = minimize(problem, x0, opts);
  const auto& sol = result.solution;

  if (!sol.succeeded()) {
    result.failure_reason = "solver status " + to_string(sol.status);
    result.e_des_after = result.e_des_before;
    return result;
  }

  const JointConfig joints = JointConfig::Unflatten(hand, sol.x);
  const Snapshot& final_snap = at(sol.x);
  result.e_des_after = e_des(final_snap.pose, scratch);

  Grasp grasp;
  grasp.object_pose = final_snap.pose;
  const RigidTransform to_object = final_snap.pose.inverse();
  for (int f = 0; f < m; ++f) {
    const Vec3 tip = final_snap.tip_positions[f];
    Vec3 local = to_object.apply(tip);
    if (std::abs(signed_distance_object(local, obj, RigidTransform())) > params.surface_tol) {
      local = project_to_surface(local, obj, RigidTransform());
    }
    result.max_slip = std::max(result.max_slip, (local - contacts_object[f]).norm());
    grasp.contacts_palm.push_back(tip);
    grasp.contacts_object.push_back(local);
  }
  if (result.max_slip > params.slip_max) {
    std::ostringstream os;
    os << "contact slip " << result.max_slip << " m exceeds slip_max";
    result.failure_reason = os.str();
    return result;
  }
  result.success = true;
  result.state.joints = joints;
  result.state.grasp = std::move(grasp);
  return result;
}

}  // namespace

RigidityCosts relaxed_rigidity_costs(std::span<const RigidTransform> tips, std::span<const RigidTransform> tips0) {
  return rigidity(tips, tips0, nullptr);
}

RigidityCosts relaxed_rigidity_costs(const HandModel& hand, const JointConfig& theta, const JointConfig& theta0) {
  const auto tips = fk_all_fingertips(hand, theta);
  const auto tips0 = fk_all_fingertips(hand, theta0);
  return rigidity(tips, tips0, nullptr);
}

ReposeResult repose_object(const HandModel& hand, const ObjectModel& obj, const HandState& state,
                           std::span<const Vec3> goal_contacts_object, std::span<const ReachableWorkspace> workspaces,
                           const ReposeParams& params, const NLPOptions& opts) {
  const auto m = static_cast<std::size_t>(hand.finger_count());
  if (goal_contacts_object.size() != m) throw StructuralInputError("repose: one goal contact per finger required");

  if (params.variant == ReposeVariant::kSD) {
    if (workspaces.size() != m) throw StructuralInputError("repose (sd): one workspace per finger required");
    std::vector<Vec3> goals(goal_contacts_object.begin(), goal_contacts_object.end());
    std::vector<Vec3> goals_palm(m);
    return solve_repose(hand, obj, state, params, opts, [&](const RigidTransform& pose, ReposeCounters& c) {
      for (std::size_t r = 0; r < m; ++r) goals_palm[r] = pose.apply(goals[r]);
      c.e_des_terms += static_cast<std::int64_t>(m);
      c.workspace_queries += static_cast<std::int64_t>(m);
      return e_des_sd(workspaces, goals_palm);
    });
  }

  const RigidTransform target =
      auxiliary_goal_pose(state.grasp.contacts_object, goal_contacts_object, state.grasp.object_pose);
  auto result = solve_repose(hand, obj, state, params, opts, [&](const RigidTransform& pose, ReposeCounters& c) {
    ++c.e_des_terms;
    ++c.pose_error_evals;
    return pose_error(pose, target, params.lambda_rot);
  });
  ++result.counters.kabsch_solves;  // auxiliary target pose
  return result;
}

ReposeResult in_grasp_to_pose(const HandModel& hand, const ObjectModel& obj, const HandState& state,
                              const RigidTransform& goal_pose, const ReposeParams& params, const NLPOptions& opts) {
  return solve_repose(hand, obj, state, params, opts, [&](const RigidTransform& pose, ReposeCounters& c) {
    ++c.e_des_terms;
    ++c.pose_error_evals;
    return pose_error(pose, goal_pose, params.lambda_rot);
  });
}

}  // namespace regrasp
