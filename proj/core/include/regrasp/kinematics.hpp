#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "regrasp/geometry.hpp"

namespace regrasp {

/// Revolute joint: fixed offset from the previous joint frame, then a
/// rotation about `axis` (expressed in the offset frame).
struct JointSpec {
  RigidTransform parent_transform;
  Vec3 axis = Vec3::UnitZ();
  double limit_min = 0.0;
  double limit_max = 0.0;
};

/// Collision sphere attached to a link frame.
struct LinkProxy {
  Vec3 local_center = Vec3::Zero();
  double radius = 0.0;
};

struct FingerModel {
  std::string name;
  RigidTransform base_transform;
  std::vector<JointSpec> joints;
  /// One list per joint; entry i holds the spheres carried by the link that
  /// follows joint i. The last link is the fingertip link.
  std::vector<std::vector<LinkProxy>> link_proxies;
  RigidTransform tip_offset;

  int dof() const { return static_cast<int>(joints.size()); }
};

/// World-space collision sphere of one finger link.
struct ProxySphere {
  Vec3 center;
  double radius;
  int link;
};

class HandModel {
 public:
  HandModel() = default;
  /// Throws StructuralInputError on invalid fingers, joints, proxies or roles.
  HandModel(std::string name, std::vector<FingerModel> fingers, std::map<std::string, int> roles = {});

  const std::string& name() const { return name_; }
  const std::vector<FingerModel>& fingers() const { return fingers_; }
  const FingerModel& finger(int index) const;
  int finger_count() const { return static_cast<int>(fingers_.size()); }
  int total_dof() const { return total_dof_; }

  const std::map<std::string, int>& roles() const { return roles_; }
  /// Finger index bound to a role name (index, middle, ring, thumb).
  std::optional<int> role(const std::string& name) const;

 private:
  std::string name_;
  std::vector<FingerModel> fingers_;
  std::map<std::string, int> roles_;
  int total_dof_ = 0;
};

/// Joint angles for every finger (radians).
struct JointConfig {
  std::vector<Eigen::VectorXd> angles;

  /// All-zero configuration shaped for `hand`.
  static JointConfig Zero(const HandModel& hand);

  Eigen::VectorXd flatten() const;
  static JointConfig Unflatten(const HandModel& hand, const Eigen::VectorXd& flat);

  /// Throws StructuralInputError unless the shape matches `hand`.
  void check_shape(const HandModel& hand) const;
  /// True when every angle lies within its limits (+- tol).
  bool within_limits(const HandModel& hand, double tol = 1e-9) const;

  bool operator==(const JointConfig& other) const;
};

/// Link frames after each joint (palm frame) followed by the fingertip frame.
std::vector<RigidTransform> fk_chain(const HandModel& hand, int finger, const Eigen::VectorXd& theta);

RigidTransform fk_fingertip(const HandModel& hand, int finger, const Eigen::VectorXd& theta);

/// Proxy spheres of every non-fingertip link in the palm frame.
std::vector<ProxySphere> fk_link_proxies(const HandModel& hand, int finger, const Eigen::VectorXd& theta);

/// Fingertip frames for every finger.
std::vector<RigidTransform> fk_all_fingertips(const HandModel& hand, const JointConfig& config);

using ScalarFunction = std::function<double(const Eigen::VectorXd&)>;

/// Central finite difference gradient. Throws NumericEvaluationError when
/// any evaluation is not finite.
Eigen::VectorXd numeric_gradient(const ScalarFunction& f, const Eigen::VectorXd& x, double h = 1e-6);

}  // namespace regrasp
