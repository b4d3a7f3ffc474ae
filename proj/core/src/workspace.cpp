#include "regrasp/workspace.hpp"

#include <array>
#include <cmath>
#include <set>

#include "regrasp/errors.hpp"

namespace regrasp {

ReachableWorkspace estimate_workspace(const HandModel& hand, int finger, double voxel_size, int samples_per_joint) {
  if (!(voxel_size > 0.0) || !std::isfinite(voxel_size)) {
    throw StructuralInputError("workspace: voxel size must be positive");
  }
  if (samples_per_joint < 2) throw StructuralInputError("workspace: need at least 2 samples per joint");
  const auto& model = hand.finger(finger);
  const int dof = model.dof();

  std::vector<int> counter(dof, 0);
  Eigen::VectorXd theta(dof);
  std::set<std::array<long long, 3>> voxels;
  std::set<std::array<long long, 3>> distinct;  // positions quantized far below the voxel size
  int samples = 0;
  while (true) {
    for (int j = 0; j < dof; ++j) {
      const auto& joint = model.joints[j];
      const double t = static_cast<double>(counter[j]) / (samples_per_joint - 1);
      theta[j] = joint.limit_min + t * (joint.limit_max - joint.limit_min);
    }
    const Vec3 tip = fk_fingertip(hand, finger, theta).translation();
    voxels.insert({static_cast<long long>(std::floor(tip.x() / voxel_size)),
                   static_cast<long long>(std::floor(tip.y() / voxel_size)),
                   static_cast<long long>(std::floor(tip.z() / voxel_size))});
    distinct.insert({std::llround(tip.x() * 1e9), std::llround(tip.y() * 1e9), std::llround(tip.z() * 1e9)});
    ++samples;

    int j = 0;
    while (j < dof && ++counter[j] == samples_per_joint) counter[j++] = 0;
    if (j == dof) break;
  }
  if (distinct.size() < 2) {
    throw DegenerateGeometryError("workspace: finger " + std::to_string(finger) +
                                  " reaches a single point (all joint limits collapsed)");
  }

  // Voxel corners: the hull of the occupied cubes, i.e. centers dilated by
  // half a voxel along each axis. Shared corners are emitted once.
  std::set<std::array<long long, 3>> corners;
  for (const auto& v : voxels) {
    for (int c = 0; c < 8; ++c) {
      corners.insert({v[0] + (c & 1), v[1] + ((c >> 1) & 1), v[2] + ((c >> 2) & 1)});
    }
  }
  std::vector<Vec3> points;
  points.reserve(corners.size());
  for (const auto& c : corners) {
    points.emplace_back(static_cast<double>(c[0]) * voxel_size, static_cast<double>(c[1]) * voxel_size,
                        static_cast<double>(c[2]) * voxel_size);
  }
  return ReachableWorkspace{finger, convex_hull(points), voxel_size, samples};
}

}  // namespace regrasp
