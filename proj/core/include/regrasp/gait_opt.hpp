#pragma once

#include <string>

#include "regrasp/grasp.hpp"
#include "regrasp/nlp.hpp"

namespace regrasp {

struct GaitParams {
  double eta = 0.01;          ///< largest fingertip step (m)
  double beta = 0.001;        ///< link clearance (m)
  double surface_tol = 1e-3;  ///< contact-on-surface tolerance (m)

  void validate() const;
};

struct GaitResult {
  bool success = false;
  Eigen::VectorXd theta_r;
  Vec3 new_contact = Vec3::Zero();  ///< palm frame
  double cost = 0.0;                ///< squared distance to the goal (m^2)
  NLPSolution solution;
  HandState state;  ///< updated state on success, the input state otherwise
  std::string failure_reason;
};

/// |goal - FK_r(theta_r)|^2
double gait_distance_cost(const HandModel& hand, int finger, const Eigen::VectorXd& theta_r, const Vec3& goal);

/// Sum of clearance penalties over the moving finger's non-fingertip proxies.
double collision_cost(const HandModel& hand, int finger, const Eigen::VectorXd& theta_r, const ObjectModel& obj,
                      const RigidTransform& pose, double beta);

/// Squared fingertip displacement from the pre-gait configuration.
double stability_constraint(const HandModel& hand, int finger, const Eigen::VectorXd& theta_r,
                            const Eigen::VectorXd& theta_r0);

/// Relocates one fingertip toward `goal` (palm frame) while it stays on the
/// object surface, its links keep `beta` clearance, and it moves at most
/// `eta`. The object and the other fingers stay put. On failure the input
/// state is returned unchanged with success = false.
GaitResult plan_finger_gait(const HandModel& hand, const ObjectModel& obj, const HandState& state, int finger,
                            const Vec3& goal, const GaitParams& params, const NLPOptions& opts = {});

}  // namespace regrasp
