#pragma once

#include <cstdint>
#include <span>
#include <string>

#include "regrasp/grasp.hpp"
#include "regrasp/nlp.hpp"
#include "regrasp/workspace.hpp"

namespace regrasp {

/// How reposing scores the desired grasp: workspace signed distances of the
/// goal contacts (SD) or the pose error to a Kabsch-fitted target (SVD).
enum class ReposeVariant { kSD, kSVD };

std::string to_string(ReposeVariant variant);
/// Accepts "sd" and "svd" (case-insensitive).
ReposeVariant repose_variant_from_string(const std::string& name);

struct ReposeParams {
  double k1 = 1000.0;         ///< weight on grasp-shape preservation
  double k2 = 10.0;           ///< weight on fingertip orientation preservation
  ReposeVariant variant = ReposeVariant::kSVD;
  double beta = 0.001;        ///< hand-object clearance (m)
  double lambda_rot = 1e-4;   ///< m^2 per rad^2 inside the pose error
  double slip_max = 0.003;    ///< largest accepted contact drift on the object (m)
  double surface_tol = 1e-3;  ///< contacts farther than this are re-projected (m)

  void validate() const;
};

/// Work done by one reposing call. `e_des_terms` counts the primitive
/// evaluations inside E_des: one per finger for SD, one for SVD.
struct ReposeCounters {
  std::int64_t objective_evals = 0;
  std::int64_t constraint_evals = 0;
  std::int64_t e_des_terms = 0;
  std::int64_t workspace_queries = 0;
  std::int64_t pose_error_evals = 0;
  std::int64_t kabsch_solves = 0;
};

struct ReposeResult {
  bool success = false;
  HandState state;  ///< updated on success, the input state otherwise
  NLPSolution solution;
  ReposeCounters counters;
  double e_des_before = 0.0;
  double e_des_after = 0.0;
  double max_slip = 0.0;
  std::string failure_reason;
};

/// Least-squares rigid transform T minimising sum |T(src_i) - dst_i|^2, with
/// reflections excluded. Throws StructuralInputError on size mismatch or
/// fewer than 3 points, DegenerateGeometryError when src is collinear.
RigidTransform kabsch_transform(std::span<const Vec3> src, std::span<const Vec3> dst);

/// sum |T(src_i) - dst_i|^2
double registration_residual(const RigidTransform& t, std::span<const Vec3> src, std::span<const Vec3> dst);

/// sum over fingers of max(0, signed distance of the goal to its workspace).
double e_des_sd(std::span<const ReachableWorkspace> workspaces, std::span<const Vec3> goals_palm);

/// Pose that brings the goal contacts (object frame) as close as possible
/// to where the current contacts sit now.
RigidTransform auxiliary_goal_pose(std::span<const Vec3> current_contacts_object,
                                   std::span<const Vec3> goal_contacts_object, const RigidTransform& current_pose);

/// |t - t_d|^2 + lambda_rot * angle(R, R_d)^2
double pose_error(const RigidTransform& pose, const RigidTransform& target, double lambda_rot);

struct RigidityCosts {
  double position = 0.0;     ///< m^2
  double orientation = 0.0;  ///< rad^2
};

/// Grasp-shape and fingertip-orientation drift between two sets of
/// fingertip frames. Both terms vanish under any common rigid motion.
RigidityCosts relaxed_rigidity_costs(std::span<const RigidTransform> tips, std::span<const RigidTransform> tips0);
RigidityCosts relaxed_rigidity_costs(const HandModel& hand, const JointConfig& theta, const JointConfig& theta0);

/// Reposing: move the object with all fingers so the goal contacts become
/// reachable. `workspaces` is only read by the SD variant.
ReposeResult repose_object(const HandModel& hand, const ObjectModel& obj, const HandState& state,
                           std::span<const Vec3> goal_contacts_object, std::span<const ReachableWorkspace> workspaces,
                           const ReposeParams& params, const NLPOptions& opts = {});

/// Terminal in-grasp move toward a desired object pose.
ReposeResult in_grasp_to_pose(const HandModel& hand, const ObjectModel& obj, const HandState& state,
                              const RigidTransform& goal_pose, const ReposeParams& params,
                              const NLPOptions& opts = {});

}  // namespace regrasp
