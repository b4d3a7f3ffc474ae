#pragma once

#include <cmath>
#include <filesystem>
#include <initializer_list>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "regrasp/planner.hpp"
#include "regrasp/scene_io.hpp"

namespace regrasp::test {

inline std::filesystem::path data_dir() { return REGRASP_TEST_DATA_DIR; }
inline std::filesystem::path scene_path(const std::string& name) { return data_dir() / "scenes" / (name + ".json"); }

inline const std::vector<std::string>& bundled_scene_names() {
  static const std::vector<std::string> names = {"box_goal1",       "box_goal2",     "hex_prism_goal1",
                                                 "hex_prism_goal2", "l_shape_goal1", "l_shape_goal2"};
  return names;
}

inline Eigen::VectorXd vec(std::initializer_list<double> values) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v[i++] = x;
  return v;
}

inline ObjectModel single_part(ConvexPart part, const std::string& name = "part") {
  ObjectModel obj;
  obj.name = name;
  obj.parts.push_back(std::move(part));
  return obj;
}

inline ConvexPart unit_cube() { return make_box(Vec3(0.5, 0.5, 0.5)); }

inline RigidTransform translation(double x, double y, double z) {
  return RigidTransform::FromTranslation(Vec3(x, y, z));
}

// Two-link chain in the xy plane: revolute joints about z, links along x.
inline FingerModel planar_finger(double l0, double l1, const RigidTransform& base = {}, double limit = std::numbers::pi,
                                 std::vector<std::vector<LinkProxy>> proxies = {}) {
  FingerModel f;
  f.name = "planar";
  f.base_transform = base;
  f.joints = {{RigidTransform(), Vec3::UnitZ(), -limit, limit}, {translation(l0, 0, 0), Vec3::UnitZ(), -limit, limit}};
  f.link_proxies = std::move(proxies);
  f.tip_offset = translation(l1, 0, 0);
  return f;
}

inline HandModel planar_hand(double l0 = 0.05, double l1 = 0.04, std::vector<std::vector<LinkProxy>> proxies = {}) {
  return HandModel("planar", {planar_finger(l0, l1, {}, std::numbers::pi, proxies),
                              planar_finger(l0, l1, translation(0, 0, 0.05), std::numbers::pi, proxies)});
}

// Literal homogeneous-matrix chain product with Rodrigues rotations.
inline Eigen::Matrix4d homogeneous(const RigidTransform& t) {
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
  m.topLeftCorner<3, 3>() = t.rotation();
  m.topRightCorner<3, 1>() = t.translation();
  return m;
}

inline Eigen::Matrix4d rodrigues(const Vec3& axis, double angle) {
  Mat3 k;
  k << 0, -axis.z(), axis.y(), axis.z(), 0, -axis.x(), -axis.y(), axis.x(), 0;
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
  m.topLeftCorner<3, 3>() = Mat3::Identity() + std::sin(angle) * k + (1.0 - std::cos(angle)) * k * k;
  return m;
}

/// Link frames (one per joint) followed by the fingertip frame.
inline std::vector<Eigen::Matrix4d> oracle_chain(const FingerModel& f, const Eigen::VectorXd& theta) {
  std::vector<Eigen::Matrix4d> frames;
  Eigen::Matrix4d t = homogeneous(f.base_transform);
  for (int i = 0; i < f.dof(); ++i) {
    t = t * homogeneous(f.joints[i].parent_transform) * rodrigues(f.joints[i].axis, theta[i]);
    frames.push_back(t);
  }
  frames.push_back(t * homogeneous(f.tip_offset));
  return frames;
}

inline Vec3 oracle_tip(const FingerModel& f, const Eigen::VectorXd& theta) {
  return oracle_chain(f, theta).back().topRightCorner<3, 1>();
}

inline Eigen::VectorXd random_in_limits(const FingerModel& f, std::mt19937_64& rng) {
  Eigen::VectorXd theta(f.dof());
  for (int i = 0; i < f.dof(); ++i) {
    std::uniform_real_distribution<double> u(f.joints[i].limit_min, f.joints[i].limit_max);
    theta[i] = u(rng);
  }
  return theta;
}

inline RigidTransform random_transform(std::mt19937_64& rng, double max_translation = 0.1) {
  std::normal_distribution<double> n(0.0, 1.0);
  std::uniform_real_distribution<double> u(-max_translation, max_translation);
  Eigen::Quaterniond q(n(rng), n(rng), n(rng), n(rng));
  q.normalize();
  return RigidTransform(q, Vec3(u(rng), u(rng), u(rng)));
}

/// Elbow-positive inverse kinematics of the planar two-link chain.
inline Eigen::VectorXd planar_ik(double l0, double l1, double x, double y) {
  const double c = (x * x + y * y - l0 * l0 - l1 * l1) / (2.0 * l0 * l1);
  const double q1 = std::acos(c);
  const double q0 = std::atan2(y, x) - std::atan2(l1 * std::sin(q1), l0 + l1 * std::cos(q1));
  return vec({q0, q1});
}

/// Planar two-link fingers (0.05 m, 0.04 m) whose tips rest on the x = 0.07
/// face of a box. `half_range` bounds each joint around the initial angles.
struct PlanarFaceFixture {
  HandModel hand;
  ObjectModel object;
  HandState state;
  static constexpr double kFace = 0.07;
};

inline PlanarFaceFixture planar_face_fixture(double half_range) {
  const Eigen::VectorXd q = planar_ik(0.05, 0.04, PlanarFaceFixture::kFace, 0.0);
  std::vector<FingerModel> fingers;
  for (int k = 0; k < 2; ++k) {
    FingerModel f = planar_finger(0.05, 0.04, translation(0, 0, 0.05 * k), std::numbers::pi,
                                  {{{Vec3(0.025, 0, 0), 0.005}}});
    for (int j = 0; j < 2; ++j) {
      f.joints[j].limit_min = q[j] - half_range;
      f.joints[j].limit_max = q[j] + half_range;
    }
    fingers.push_back(std::move(f));
  }
  PlanarFaceFixture fx;
  fx.hand = HandModel("planar-face", std::move(fingers));
  fx.object = single_part(make_box(Vec3(0.025, 0.06, 0.06), Vec3(PlanarFaceFixture::kFace + 0.025, 0, 0.025)), "box");
  fx.state.joints.angles = {q, q};
  fx.state.grasp = Grasp::FromJoints(fx.hand, fx.state.joints, RigidTransform());
  return fx;
}

/// Three 6R fingers (shoulder x-y, elbow y, wrist x-y-z) with wide limits,
/// so that small object motions are never blocked by the kinematics.
inline HandModel six_dof_hand() {
  std::vector<FingerModel> fingers;
  const std::vector<Vec3> bases = {Vec3(0.02, 0.04, 0.05), Vec3(-0.03, 0.0, 0.05), Vec3(0.02, -0.04, 0.05)};
  for (std::size_t k = 0; k < bases.size(); ++k) {
    FingerModel f;
    f.name = "f" + std::to_string(k);
    f.base_transform = RigidTransform::FromTranslation(bases[k]);
    f.joints = {{RigidTransform(), Vec3::UnitX(), -2.5, 2.5},        {RigidTransform(), Vec3::UnitY(), -2.5, 2.5},
                {translation(0, 0, 0.05), Vec3::UnitY(), -2.5, 2.5}, {translation(0, 0, 0.05), Vec3::UnitX(), -2.5, 2.5},
                {RigidTransform(), Vec3::UnitY(), -2.5, 2.5},        {RigidTransform(), Vec3::UnitZ(), -2.5, 2.5}};
    f.tip_offset = translation(0, 0, 0.02);
    fingers.push_back(std::move(f));
  }
  return HandModel("six-dof", std::move(fingers));
}

/// The six-DOF hand holding a box by its bottom face. Shoulder a, elbow -2a
/// and wrist a keep each tip above its base, pointing up, at
/// z = 0.07 + 0.1 cos a.
struct SixDofFixture {
  HandModel hand;
  ObjectModel object;
  HandState state;
};

inline SixDofFixture six_dof_fixture() {
  SixDofFixture fx;
  fx.hand = six_dof_hand();
  fx.object = single_part(make_box(Vec3(0.06, 0.07, 0.025)), "box");
  const double a = 0.5;
  fx.state.joints = JointConfig::Zero(fx.hand);
  for (auto& theta : fx.state.joints.angles) {
    theta[1] = a;
    theta[2] = -2.0 * a;
    theta[4] = a;
  }
  fx.state.grasp = Grasp::FromJoints(fx.hand, fx.state.joints, translation(0, 0, 0.07 + 0.1 * std::cos(a) + 0.025));
  return fx;
}

/// Scene over the planar face fixture with the given object-frame goals.
inline Scene planar_scene(const PlanarFaceFixture& fx, std::vector<Vec3> goals) {
  Scene scene;
  scene.name = "planar";
  scene.hand = fx.hand;
  scene.object = fx.object;
  scene.initial_joints = fx.state.joints;
  scene.goal_contacts_object = std::move(goals);
  scene.validate();
  return scene;
}

/// Plan step at `joints` with the object at the identity pose.
inline PlanStep make_step(const Scene& scene, StepKind kind, std::optional<int> finger, const JointConfig& joints) {
  PlanStep step;
  step.kind = kind;
  step.finger = finger;
  step.joints = joints;
  step.grasp = Grasp::FromJoints(scene.hand, joints, RigidTransform());
  step.max_error = max_point_error(step.grasp.contacts_object, scene.goal_contacts_object);
  step.avg_error = average_point_error(step.grasp.contacts_object, scene.goal_contacts_object);
  return step;
}

struct SceneAndPlan {
  Scene scene;
  Plan plan;
};

/// A gait that flips finger 0 between its two elbow configurations on the
/// x = 0.07 face. The proxy sits at the elbow of a long proximal link, so
/// both endpoints clear the face while the straight pose in between does not.
inline SceneAndPlan elbow_flip_case() {
  const double l0 = 0.065, l1 = 0.02;
  PlanarFaceFixture fx;
  std::vector<FingerModel> fingers;
  for (int k = 0; k < 2; ++k) {
    fingers.push_back(planar_finger(l0, l1, translation(0, 0, 0.05 * k), std::numbers::pi, {{{Vec3(l0, 0, 0), 0.005}}}));
  }
  fx.hand = HandModel("elbow", std::move(fingers));
  fx.object = single_part(make_box(Vec3(0.025, 0.06, 0.06), Vec3(PlanarFaceFixture::kFace + 0.025, 0, 0.025)), "box");
  const Eigen::VectorXd up = planar_ik(l0, l1, PlanarFaceFixture::kFace, 0.0);
  fx.state.joints.angles = {up, up};
  fx.state.grasp = Grasp::FromJoints(fx.hand, fx.state.joints, RigidTransform());

  SceneAndPlan out;
  out.scene = planar_scene(fx, fx.state.grasp.contacts_object);
  out.plan.scene = out.scene.name;
  out.plan.params = out.scene.params;
  out.plan.steps.push_back(make_step(out.scene, StepKind::kInitial, std::nullopt, out.scene.initial_joints));
  JointConfig flipped = out.scene.initial_joints;
  flipped.angles[0] = vec({-up[0], -up[1]});
  out.plan.steps.push_back(make_step(out.scene, StepKind::kGait, 0, flipped));
  out.plan.iterations = 1;
  out.plan.status = PlanStatus::kReached;
  return out;
}

}  // namespace regrasp::test
