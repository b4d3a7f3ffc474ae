#include "regrasp/grasp.hpp"

#include <algorithm>
#include <cmath>

namespace regrasp {

Grasp Grasp::FromJoints(const HandModel& hand, const JointConfig& joints, const RigidTransform& pose) {
  Grasp g;
  g.object_pose = pose;
  const RigidTransform to_object = pose.inverse();
  for (const auto& tip : fk_all_fingertips(hand, joints)) {
    g.contacts_palm.push_back(tip.translation());
    g.contacts_object.push_back(to_object.apply(tip.translation()));
  }
  return g;
}

double Grasp::frame_mismatch() const {
  double worst = 0.0;
  for (std::size_t i = 0; i < contacts_palm.size() && i < contacts_object.size(); ++i) {
    worst = std::max(worst, (contacts_palm[i] - object_pose.apply(contacts_object[i])).norm());
  }
  return worst;
}

double Grasp::max_surface_distance(const ObjectModel& obj) const {
  double worst = 0.0;
  for (const auto& c : contacts_palm) worst = std::max(worst, std::abs(signed_distance_object(c, obj, object_pose)));
  return worst;
}

bool Grasp::operator==(const Grasp& other) const {
  return contacts_palm == other.contacts_palm && contacts_object == other.contacts_object &&
         object_pose == other.object_pose;
}

}  // namespace regrasp
