// Regenerates the bundled hand, objects and scenes under data/.
//
//   make_scenes <data-dir>
//
// Initial grasps and goal contacts come from inverse kinematics with the
// library's own solver, so every bundled fingertip lies on the surface
// within 1e-5 m and every goal is reachable from the initial object pose.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "regrasp/gait_opt.hpp"
#include "regrasp/scene_io.hpp"

using namespace regrasp;

namespace {

RigidTransform at(double x, double y, double z) { return RigidTransform::FromTranslation(Vec3(x, y, z)); }

FingerModel make_finger(const std::string& name, const RigidTransform& base) {
  FingerModel f;
  f.name = name;
  f.base_transform = base;
  f.joints = {
      {RigidTransform(), Vec3::UnitX(), -0.47, 0.47},
      {at(0, 0, 0.0164), Vec3::UnitY(), -0.196, 1.61},
      {at(0, 0, 0.054), Vec3::UnitY(), -0.174, 1.709},
      {at(0, 0, 0.0384), Vec3::UnitY(), -0.227, 1.618},
  };
  f.link_proxies = {{}, {{Vec3(0, 0, 0.027), 0.01}}, {{Vec3(0, 0, 0.019), 0.01}}};
  f.tip_offset = at(0, 0, 0.0267);
  return f;
}

HandModel default_hand() {
  std::vector<FingerModel> fingers = {
      make_finger("index", at(0, 0.045, 0.095)),
      make_finger("middle", at(0, 0, 0.095)),
      make_finger("ring", at(0, -0.045, 0.095)),
      make_finger("thumb", at(0, -0.09, 0.075)),
  };
  return HandModel("default-4-finger", std::move(fingers), {{"index", 0}, {"middle", 1}, {"ring", 2}, {"thumb", 3}});
}

/// Same chain as the default hand with one abduction joint frozen to a
/// single value, so its workspace has no volume.
HandModel degenerate_hand() {
  FingerModel f = make_finger("frozen", RigidTransform());
  for (auto& j : f.joints) j.limit_min = j.limit_max = 0.2;
  FingerModel g = f;
  g.name = "frozen-2";
  g.base_transform = at(0, 0.05, 0);
  return HandModel("degenerate-limits", {f, g});
}

const Eigen::VectorXd kNominal = (Eigen::VectorXd(4) << 0.0, 0.5, 0.6, 0.5).finished();

/// Joint angles putting the fingertip on `target` (palm frame) with link
/// clearance. Throws when the residual exceeds 1e-6 m.
Eigen::VectorXd solve_ik(const HandModel& hand, int finger, const Vec3& target, const ObjectModel& obj,
                         const RigidTransform& pose, const Eigen::VectorXd& seed) {
  const auto& model = hand.finger(finger);
  NLPProblem problem;
  problem.dim = model.dof();
  problem.lower.resize(model.dof());
  problem.upper.resize(model.dof());
  for (int j = 0; j < model.dof(); ++j) {
    problem.lower[j] = model.joints[j].limit_min;
    problem.upper[j] = model.joints[j].limit_max;
  }
  problem.objective.value = [&](const Eigen::VectorXd& x) {
    return (fk_fingertip(hand, finger, x).translation() - target).squaredNorm() + 1e-9 * (x - seed).squaredNorm();
  };
  problem.eq_constraints.push_back(
      {[&](const Eigen::VectorXd& x) { return collision_cost(hand, finger, x, obj, pose, 0.003); }});
  NLPOptions opts;
  opts.feas_tol = 1e-7;
  opts.opt_tol = 1e-12;
  opts.max_inner = 500;
  const NLPSolution sol = minimize(problem, seed, opts);
  const double residual = (fk_fingertip(hand, finger, sol.x).translation() - target).norm();
  if (!(residual <= 1e-5) || !sol.feasible(opts.feas_tol)) {
    throw std::runtime_error("ik failed for finger " + std::to_string(finger) + " residual " + std::to_string(residual));
  }
  return sol.x;
}

/// First surface point hit by a ray from the palm side along +x.
Vec3 cast_along_x(const Vec3& through, const ObjectModel& obj, const RigidTransform& pose) {
  Vec3 outside(-0.05, through.y(), through.z());
  Vec3 inside = outside;
  while (signed_distance_object(inside, obj, pose) >= 0.0) {
    inside.x() += 0.001;
    if (inside.x() > 0.5) throw std::runtime_error("ray misses the object");
  }
  outside.x() = inside.x() - 0.001;
  for (int i = 0; i < 80; ++i) {
    const Vec3 mid = 0.5 * (outside + inside);
    (signed_distance_object(mid, obj, pose) > 0.0 ? outside : inside) = mid;
  }
  return outside;
}

struct ObjectSpec {
  std::string file;
  ObjectModel object;
  RigidTransform pose;
  /// Per-goal list of per-finger palm-frame displacements of the contact.
  std::vector<std::vector<Vec3>> goal_shifts;
};

Scene build_scene(const HandModel& hand, const ObjectSpec& spec, std::size_t goal_index) {
  Scene scene;
  scene.hand = hand;
  scene.object = spec.object;
  scene.initial_pose = spec.pose;
  scene.initial_joints = JointConfig::Zero(hand);
  const int m = hand.finger_count();
  for (int f = 0; f < m; ++f) {
    const Vec3 nominal = fk_fingertip(hand, f, kNominal).translation();
    const Vec3 contact = cast_along_x(nominal, spec.object, spec.pose);
    scene.initial_joints.angles[f] = solve_ik(hand, f, contact, spec.object, spec.pose, kNominal);
  }
  const Grasp grasp = Grasp::FromJoints(hand, scene.initial_joints, spec.pose);
  // Shrink a requested shift until the goal is reachable with clearance.
  for (int f = 0; f < m; ++f) {
    for (double scale = 1.0;; scale -= 0.125) {
      if (scale <= 0.0) throw std::runtime_error("no reachable goal for finger " + std::to_string(f));
      const Vec3 shifted = grasp.contacts_palm[f] + scale * spec.goal_shifts[goal_index][f];
      Vec3 goal_palm;
      try {
        goal_palm = cast_along_x(shifted, spec.object, spec.pose);
        solve_ik(hand, f, goal_palm, spec.object, spec.pose, scene.initial_joints.angles[f]);
      } catch (const std::runtime_error&) {
        continue;
      }
      std::printf("  finger %d goal shift %.1f mm\n", f, (goal_palm - grasp.contacts_palm[f]).norm() * 1e3);
      scene.goal_contacts_object.push_back(spec.pose.inverse().apply(goal_palm));
      break;
    }
  }
  scene.goal_pose = at(0.0, 0.004, 0.004) * spec.pose;
  return scene;
}

ObjectModel l_shape() {
  ObjectModel obj;
  obj.name = "l-shape";
  obj.parts.push_back(make_box(Vec3(0.03, 0.085, 0.025), Vec3(0.0, -0.005, -0.035)));
  obj.parts.push_back(make_box(Vec3(0.03, 0.06, 0.035), Vec3(0.0, 0.02, 0.025)));
  return obj;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::fprintf(stderr, "usage: make_scenes <data-dir>\n");
    return 3;
  }
  std::setvbuf(stdout, nullptr, _IONBF, 0);
  const std::filesystem::path root = argv[1];
  std::filesystem::create_directories(root / "hands");
  std::filesystem::create_directories(root / "objects");
  std::filesystem::create_directories(root / "scenes");

  const HandModel hand = default_hand();
  save_hand(hand, root / "hands" / "default_hand.json");
  save_hand(degenerate_hand(), root / "hands" / "degenerate_hand.json");

  ObjectModel box{"box", {make_box(Vec3(0.03, 0.08, 0.06))}};
  ObjectModel hexagon{"hex-prism", {make_regular_prism(6, 0.06, 0.075)}};

  const std::vector<Vec3> up(4, Vec3(0, 0, 0.02));
  const std::vector<Vec3> mixed = {Vec3(0, 0.012, -0.012), Vec3(0, 0.0, -0.02), Vec3(0, -0.012, 0.012),
                                   Vec3(0, 0.01, 0.015)};
  const std::vector<Vec3> down(4, Vec3(0, 0, -0.018));
  const std::vector<Vec3> spread = {Vec3(0, 0.015, 0.01), Vec3(0, 0.0, 0.018), Vec3(0, -0.015, 0.01),
                                    Vec3(0, -0.012, 0.0)};

  const std::vector<ObjectSpec> specs = {
      {"box", box, at(0.09, -0.02, 0.175), {up, mixed}},
      {"hex_prism", hexagon,
       at(0.06 + 0.06 * std::cos(std::numbers::pi / 6), -0.02, 0.175) *
           RigidTransform::FromAxisAngle(Vec3::UnitX(), -std::numbers::pi / 2) *
           RigidTransform::FromAxisAngle(Vec3::UnitZ(), std::numbers::pi / 6),
       {down, spread}},
      {"l_shape", l_shape(), at(0.09, -0.02, 0.175), {up, mixed}},
  };

  for (const auto& spec : specs) {
    save_object(spec.object, root / "objects" / (spec.file + ".json"));
    for (std::size_t g = 0; g < spec.goal_shifts.size(); ++g) {
      Scene scene = build_scene(hand, spec, g);
      scene.name = spec.file + "_goal" + std::to_string(g + 1);
      save_scene(scene, root / "scenes" / (scene.name + ".json"));
      std::printf("wrote %s\n", scene.name.c_str());
    }
  }

  // Goals on the far face: the fingertips cannot get behind the box.
  {
    Scene scene = build_scene(hand, specs[0], 0);
    scene.name = "adversarial_far_face";
    scene.goal_contacts_object.clear();
    for (const Vec3& c : Grasp::FromJoints(hand, scene.initial_joints, scene.initial_pose).contacts_object) {
      scene.goal_contacts_object.emplace_back(0.03, c.y(), c.z());
    }
    save_scene(scene, root / "scenes" / (scene.name + ".json"));
    std::printf("wrote %s\n", scene.name.c_str());
  }
  return 0;
}
