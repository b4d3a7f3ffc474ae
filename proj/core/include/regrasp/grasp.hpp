#pragma once

#include <vector>

#include "regrasp/geometry.hpp"
#include "regrasp/kinematics.hpp"

namespace regrasp {

/// Fingertip contacts, in the palm frame and in the object frame, together
/// with the object pose that relates them.
struct Grasp {
  std::vector<Vec3> contacts_palm;
  std::vector<Vec3> contacts_object;
  RigidTransform object_pose;

  /// Builds the grasp implied by the fingertip positions of `joints` with
  /// the object at `pose`.
  static Grasp FromJoints(const HandModel& hand, const JointConfig& joints, const RigidTransform& pose);

  /// Largest |contacts_palm - pose(contacts_object)|.
  double frame_mismatch() const;
  /// Largest |signed distance| over the contacts.
  double max_surface_distance(const ObjectModel& obj) const;

  bool operator==(const Grasp& other) const;
};

/// Planner state: the grasp and the joint configuration realising it.
struct HandState {
  Grasp grasp;
  JointConfig joints;
};

}  // namespace regrasp
