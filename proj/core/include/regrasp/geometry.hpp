#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace regrasp {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Proper rigid motion x -> R x + t. The rotation is held as a unit
/// quaternion so that serialized poses round-trip bit-exactly.
class RigidTransform {
 public:
  RigidTransform() : rotation_(Eigen::Quaterniond::Identity()), translation_(Vec3::Zero()) {}
  RigidTransform(const Eigen::Quaterniond& q, const Vec3& t);

  /// Throws StructuralInputError unless R^T R = I and det R = 1 (1e-9).
  static RigidTransform FromMatrix(const Mat3& rotation, const Vec3& translation);
  static RigidTransform FromTranslation(const Vec3& t);
  static RigidTransform FromAxisAngle(const Vec3& axis, double angle, const Vec3& t = Vec3::Zero());

  Mat3 rotation() const { return rotation_.toRotationMatrix(); }
  const Eigen::Quaterniond& quaternion() const { return rotation_; }
  const Vec3& translation() const { return translation_; }

  Vec3 apply(const Vec3& p) const { return rotation_ * p + translation_; }
  Vec3 rotate(const Vec3& v) const { return rotation_ * v; }

  /// (a * b).apply(p) == a.apply(b.apply(p))
  RigidTransform operator*(const RigidTransform& rhs) const;
  RigidTransform inverse() const;

  bool operator==(const RigidTransform& other) const;

 private:
  Eigen::Quaterniond rotation_;
  Vec3 translation_;
};

/// Geodesic angle between two rotations, in [0, pi].
double rotation_angle(const Mat3& a, const Mat3& b);

/// A closed convex polytope with outward-facing triangles.
class ConvexPart {
 public:
  using Face = std::array<int, 3>;

  /// Validates the mesh and derives plane data. Faces must wind
  /// counter-clockwise seen from outside. When `normals` is non-empty each
  /// entry must agree with the winding. Throws StructuralInputError or
  /// DegenerateGeometryError.
  ConvexPart(std::vector<Vec3> vertices, std::vector<Face> faces, std::vector<Vec3> normals = {});

  const std::vector<Vec3>& vertices() const { return vertices_; }
  const std::vector<Face>& faces() const { return faces_; }
  const std::vector<Vec3>& normals() const { return normals_; }
  const std::vector<double>& offsets() const { return offsets_; }

  double volume() const { return volume_; }
  Vec3 centroid() const { return centroid_; }
  Eigen::AlignedBox3d bounds() const { return bounds_; }

  /// Largest plane value n.p - d over all faces; <= 0 means inside or on.
  double max_plane_value(const Vec3& p) const;

  /// Nearest point on the boundary.
  Vec3 closest_boundary_point(const Vec3& p) const;

 private:
  std::vector<Vec3> vertices_;
  std::vector<Face> faces_;
  std::vector<Vec3> normals_;
  std::vector<double> offsets_;
  double volume_ = 0.0;
  Vec3 centroid_ = Vec3::Zero();
  Eigen::AlignedBox3d bounds_;
};

/// Rigid object expressed as a union of convex parts in its body frame.
struct ObjectModel {
  std::string name;
  std::vector<ConvexPart> parts;

  /// Throws StructuralInputError when there are no parts.
  void validate() const;
};

/// Tolerance used for convexity and containment checks (meters).
inline constexpr double kGeometryTolerance = 1e-9;

/// Exact signed distance to a convex part: negative inside, zero on the
/// boundary, positive outside.
double signed_distance_part(const Vec3& p, const ConvexPart& part);

/// Minimum over parts of the per-part signed distance, with `p` given in
/// the frame where the object sits at `pose`. Never exceeds the true union
/// signed distance.
double signed_distance_object(const Vec3& p, const ObjectModel& obj, const RigidTransform& pose);

/// Closest point on the surface of the part realising the minimum above,
/// returned in the same frame as `p`.
Vec3 project_to_surface(const Vec3& p, const ObjectModel& obj, const RigidTransform& pose);

/// Convex hull of a point cloud. Throws DegenerateGeometryError when the
/// points do not span a volume and StructuralInputError for fewer than 4.
ConvexPart convex_hull(std::span<const Vec3> points);

/// beta - min(beta, sd): zero once the clearance reaches beta, then linear.
inline double clearance_penalty(double sd, double beta) { return beta - std::min(beta, sd); }

/// Axis-aligned box [-h, h] around `center`, as a 12-triangle part.
ConvexPart make_box(const Vec3& half_extents, const Vec3& center = Vec3::Zero());

/// Right prism with a regular polygonal cross-section in the xy plane.
ConvexPart make_regular_prism(int sides, double circumradius, double half_height,
                              const Vec3& center = Vec3::Zero());

}  // namespace regrasp
