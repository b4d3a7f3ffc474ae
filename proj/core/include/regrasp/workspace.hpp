#pragma once

#include "regrasp/geometry.hpp"
#include "regrasp/kinematics.hpp"

namespace regrasp {

/// Convex over-approximation of the positions one fingertip can reach,
/// expressed in the palm frame.
struct ReachableWorkspace {
  int finger = 0;
  ConvexPart hull;
  double voxel_size = 0.0;
  int sample_count = 0;
};

inline constexpr double kDefaultWorkspaceVoxel = 0.005;
inline constexpr int kDefaultWorkspaceSamples = 9;

/// Samples the joint grid (inclusive of limits), voxelizes the fingertip
/// positions, and returns the hull of the occupied voxels. Throws
/// StructuralInputError for bad parameters and DegenerateGeometryError when
/// every sample collapses to a single point.
ReachableWorkspace estimate_workspace(const HandModel& hand, int finger,
                                      double voxel_size = kDefaultWorkspaceVoxel,
                                      int samples_per_joint = kDefaultWorkspaceSamples);

inline double workspace_signed_distance(const Vec3& p, const ReachableWorkspace& ws) {
  return signed_distance_part(p, ws.hull);
}

}  // namespace regrasp
