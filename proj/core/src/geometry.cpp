#include "regrasp/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>
#include <utility>

#include "regrasp/errors.hpp"

namespace regrasp {

// ---------------------------------------------------------------------------
// RigidTransform

RigidTransform::RigidTransform(const Eigen::Quaterniond& q, const Vec3& t) : rotation_(q), translation_(t) {
  const double n = rotation_.norm();
  if (!std::isfinite(n) || n < 1e-12 || !t.allFinite()) {
    throw StructuralInputError("rigid transform: non-finite or zero quaternion");
  }
  rotation_.coeffs() /= n;
}

RigidTransform RigidTransform::FromMatrix(const Mat3& rotation, const Vec3& translation) {
  const double ortho = (rotation.transpose() * rotation - Mat3::Identity()).cwiseAbs().maxCoeff();
  const double det = rotation.determinant();
  if (!(ortho <= 1e-9) || !(std::abs(det - 1.0) <= 1e-9)) {
    std::ostringstream os;
    os << "rigid transform: rotation is not proper orthonormal (|R^T R - I| = " << ortho << ", det = " << det << ")";
    throw StructuralInputError(os.str());
  }
  return RigidTransform(Eigen::Quaterniond(rotation), translation);
}

RigidTransform RigidTransform::FromTranslation(const Vec3& t) {
  return RigidTransform(Eigen::Quaterniond::Identity(), t);
}

RigidTransform RigidTransform::FromAxisAngle(const Vec3& axis, double angle, const Vec3& t) {
  return RigidTransform(Eigen::Quaterniond(Eigen::AngleAxisd(angle, axis.normalized())), t);
}

RigidTransform RigidTransform::operator*(const RigidTransform& rhs) const {
  RigidTransform out;
  out.rotation_ = (rotation_ * rhs.rotation_).normalized();
  out.translation_ = rotation_ * rhs.translation_ + translation_;
  return out;
}

RigidTransform RigidTransform::inverse() const {
  RigidTransform out;
  out.rotation_ = rotation_.conjugate();
  out.translation_ = -(out.rotation_ * translation_);
  return out;
}

bool RigidTransform::operator==(const RigidTransform& other) const {
  return rotation_.coeffs() == other.rotation_.coeffs() && translation_ == other.translation_;
}

double rotation_angle(const Mat3& a, const Mat3& b) {
  const Mat3 r = a.transpose() * b;
  const Vec3 axis(r(2, 1) - r(1, 2), r(0, 2) - r(2, 0), r(1, 0) - r(0, 1));
  const double s = 0.5 * axis.norm();
  const double c = 0.5 * (r.trace() - 1.0);
  return std::atan2(s, c);
}

// ---------------------------------------------------------------------------
// ConvexPart

namespace {

Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
  // Voronoi-region walk over the triangle's vertices, edges and interior.
  const Vec3 ab = b - a;
  const Vec3 ac = c - a;
  const Vec3 ap = p - a;
  const double d1 = ab.dot(ap);
  const double d2 = ac.dot(ap);
  if (d1 <= 0.0 && d2 <= 0.0) return a;

  const Vec3 bp = p - b;
  const double d3 = ab.dot(bp);
  const double d4 = ac.dot(bp);
  if (d3 >= 0.0 && d4 <= d3) return b;

  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) {
    const double v = d1 / (d1 - d3);
    return a + v * ab;
  }

  const Vec3 cp = p - c;
  const double d5 = ab.dot(cp);
  const double d6 = ac.dot(cp);
  if (d6 >= 0.0 && d5 <= d6) return c;

  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) {
    const double w = d2 / (d2 - d6);
    return a + w * ac;
  }

  const double va = d3 * d6 - d5 * d4;
  if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
    const double w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
    return b + w * (c - b);
  }

  const double denom = 1.0 / (va + vb + vc);
  const double v = vb * denom;
  const double w = vc * denom;
  return a + ab * v + ac * w;
}

}  // namespace

ConvexPart::ConvexPart(std::vector<Vec3> vertices, std::vector<Face> faces, std::vector<Vec3> normals)
    : vertices_(std::move(vertices)), faces_(std::move(faces)) {
  const int nv = static_cast<int>(vertices_.size());
  if (nv < 4) throw DegenerateGeometryError("convex part: needs at least 4 vertices");
  if (faces_.size() < 4) throw DegenerateGeometryError("convex part: needs at least 4 faces");
  if (!normals.empty() && normals.size() != faces_.size()) {
    throw StructuralInputError("convex part: normals count does not match faces count");
  }
  for (const auto& v : vertices_) {
    if (!v.allFinite()) throw StructuralInputError("convex part: non-finite vertex");
  }

  bounds_.setEmpty();
  for (const auto& v : vertices_) bounds_.extend(v);
  const double scale = std::max(1.0, bounds_.diagonal().norm());

  normals_.reserve(faces_.size());
  offsets_.reserve(faces_.size());
  std::map<std::pair<int, int>, int> directed_edges;
  for (std::size_t f = 0; f < faces_.size(); ++f) {
    const auto& face = faces_[f];
    for (int idx : face) {
      if (idx < 0 || idx >= nv) {
        throw StructuralInputError("convex part: face " + std::to_string(f) + " references vertex " +
                                   std::to_string(idx) + " out of range");
      }
    }
    if (face[0] == face[1] || face[1] == face[2] || face[0] == face[2]) {
      throw DegenerateGeometryError("convex part: face " + std::to_string(f) + " repeats a vertex");
    }
    const Vec3 cross = (vertices_[face[1]] - vertices_[face[0]]).cross(vertices_[face[2]] - vertices_[face[0]]);
    const double area2 = cross.norm();
    if (!(area2 > 1e-18 * scale * scale)) {
      throw DegenerateGeometryError("convex part: face " + std::to_string(f) + " has zero area");
    }
    const Vec3 n = cross / area2;
    if (!normals.empty()) {
      const double len = normals[f].norm();
      if (!(std::abs(len - 1.0) <= 1e-6) || n.dot(normals[f] / len) < 1.0 - 1e-6) {
        throw StructuralInputError("convex part: normal of face " + std::to_string(f) +
                                   " disagrees with its vertex winding");
      }
    }
    normals_.push_back(n);
    offsets_.push_back(n.dot(vertices_[face[0]]));
    for (int k = 0; k < 3; ++k) {
      const auto edge = std::make_pair(face[k], face[(k + 1) % 3]);
      if (!directed_edges.emplace(edge, static_cast<int>(f)).second) {
        throw StructuralInputError("convex part: edge (" + std::to_string(edge.first) + "," +
                                   std::to_string(edge.second) + ") used twice in the same direction");
      }
    }
  }
  for (const auto& [edge, face] : directed_edges) {
    if (!directed_edges.contains({edge.second, edge.first})) {
      throw StructuralInputError("convex part: not watertight, edge (" + std::to_string(edge.first) + "," +
                                 std::to_string(edge.second) + ") has a single face");
    }
  }

  for (std::size_t f = 0; f < faces_.size(); ++f) {
    for (int v = 0; v < nv; ++v) {
      const double value = normals_[f].dot(vertices_[v]) - offsets_[f];
      if (value > kGeometryTolerance) {
        std::ostringstream os;
        os << "convex part: vertex " << v << " lies " << value << " m outside face " << f
           << " (not convex or faces wound inward)";
        throw StructuralInputError(os.str());
      }
    }
  }

  // Divergence theorem over the triangulated boundary.
  const Vec3 origin = vertices_[0];
  double volume6 = 0.0;
  Vec3 moment = Vec3::Zero();
  for (const auto& face : faces_) {
    const Vec3 a = vertices_[face[0]] - origin;
    const Vec3 b = vertices_[face[1]] - origin;
    const Vec3 c = vertices_[face[2]] - origin;
    const double v6 = a.dot(b.cross(c));
    volume6 += v6;
    moment += v6 * (a + b + c) / 4.0;
  }
  volume_ = volume6 / 6.0;
  if (!(volume_ > 1e-15 * scale * scale * scale)) {
    throw DegenerateGeometryError("convex part: vertices are coplanar (zero volume)");
  }
  centroid_ = origin + moment / volume6;
}

double ConvexPart::max_plane_value(const Vec3& p) const {
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t f = 0; f < normals_.size(); ++f) {
    best = std::max(best, normals_[f].dot(p) - offsets_[f]);
  }
  return best;
}

Vec3 ConvexPart::closest_boundary_point(const Vec3& p) const {
  double best_plane = -std::numeric_limits<double>::infinity();
  std::size_t best_face = 0;
  for (std::size_t f = 0; f < normals_.size(); ++f) {
    const double value = normals_[f].dot(p) - offsets_[f];
    if (value > best_plane) {
      best_plane = value;
      best_face = f;
    }
  }
  if (best_plane <= 0.0) return p - best_plane * normals_[best_face];

  double best_d2 = std::numeric_limits<double>::infinity();
  Vec3 best = p;
  for (std::size_t f = 0; f < faces_.size(); ++f) {
    if (normals_[f].dot(p) - offsets_[f] < -kGeometryTolerance) continue;
    const auto& face = faces_[f];
    const Vec3 q = closest_point_on_triangle(p, vertices_[face[0]], vertices_[face[1]], vertices_[face[2]]);
    const double d2 = (p - q).squaredNorm();
    if (d2 < best_d2) {
      best_d2 = d2;
      best = q;
    }
  }
  return best;
}

void ObjectModel::validate() const {
  if (parts.empty()) throw StructuralInputError("object '" + name + "': needs at least one convex part");
}

// ---------------------------------------------------------------------------
// Signed distance

double signed_distance_part(const Vec3& p, const ConvexPart& part) {
  const auto& normals = part.normals();
  const auto& offsets = part.offsets();
  double max_plane = -std::numeric_limits<double>::infinity();
  for (std::size_t f = 0; f < normals.size(); ++f) {
    max_plane = std::max(max_plane, normals[f].dot(p) - offsets[f]);
  }
  // Inside a convex polytope the nearest boundary point lies on the nearest
  // face plane, so the largest plane value is the exact signed distance.
  if (max_plane <= 0.0) return max_plane;

  // Outside: the closest boundary point belongs to a face that sees p. The
  // filter keeps faces that see p only up to rounding (coplanar neighbours).
  const auto& vertices = part.vertices();
  const auto& faces = part.faces();
  double best_d2 = std::numeric_limits<double>::infinity();
  for (std::size_t f = 0; f < faces.size(); ++f) {
    if (normals[f].dot(p) - offsets[f] < -kGeometryTolerance) continue;
    const auto& face = faces[f];
    const Vec3 q = closest_point_on_triangle(p, vertices[face[0]], vertices[face[1]], vertices[face[2]]);
    best_d2 = std::min(best_d2, (p - q).squaredNorm());
  }
  return std::sqrt(best_d2);
}

double signed_distance_object(const Vec3& p, const ObjectModel& obj, const RigidTransform& pose) {
  const Vec3 local = pose.inverse().apply(p);
  double best = std::numeric_limits<double>::infinity();
  for (const auto& part : obj.parts) best = std::min(best, signed_distance_part(local, part));
  return best;
}

Vec3 project_to_surface(const Vec3& p, const ObjectModel& obj, const RigidTransform& pose) {
  obj.validate();
  const Vec3 local = pose.inverse().apply(p);
  std::size_t best_part = 0;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < obj.parts.size(); ++i) {
    const double sd = signed_distance_part(local, obj.parts[i]);
    if (sd < best) {
      best = sd;
      best_part = i;
    }
  }
  return pose.apply(obj.parts[best_part].closest_boundary_point(local));
}

// ---------------------------------------------------------------------------
// Convex hull (incremental, with per-face outside sets)

namespace {

struct HullFace {
  std::array<int, 3> v;
  Vec3 normal;
  double offset;
  bool alive = true;
  std::vector<int> outside;
};

class HullBuilder {
 public:
  HullBuilder(std::span<const Vec3> points, double eps) : points_(points), eps_(eps) {}

  ConvexPart build() {
    seed();
    std::size_t cursor = 0;
    while (true) {
      // Round-robin over faces keeps the traversal order deterministic.
      int face_id = -1;
      for (std::size_t k = 0; k < faces_.size(); ++k) {
        const std::size_t f = (cursor + k) % faces_.size();
        if (faces_[f].alive && !faces_[f].outside.empty()) {
          face_id = static_cast<int>(f);
          break;
        }
      }
      if (face_id < 0) break;
      cursor = static_cast<std::size_t>(face_id);
      add_point(face_id);
    }
    return extract();
  }

 private:
  double plane(const HullFace& f, int p) const { return f.normal.dot(points_[p]) - f.offset; }

  int make_face(int a, int b, int c) {
    HullFace f;
    f.v = {a, b, c};
    const Vec3 cross = (points_[b] - points_[a]).cross(points_[c] - points_[a]);
    f.normal = cross.normalized();
    f.offset = f.normal.dot(points_[a]);
    faces_.push_back(std::move(f));
    const int id = static_cast<int>(faces_.size()) - 1;
    for (int k = 0; k < 3; ++k) edges_[{faces_[id].v[k], faces_[id].v[(k + 1) % 3]}] = id;
    return id;
  }

  void seed() {
    const int n = static_cast<int>(points_.size());
    // Extreme points along the axes give a wide first edge.
    std::array<int, 6> extremes{0, 0, 0, 0, 0, 0};
    for (int i = 0; i < n; ++i) {
      for (int axis = 0; axis < 3; ++axis) {
        if (points_[i][axis] < points_[extremes[2 * axis]][axis]) extremes[2 * axis] = i;
        if (points_[i][axis] > points_[extremes[2 * axis + 1]][axis]) extremes[2 * axis + 1] = i;
      }
    }
    int a = extremes[0], b = extremes[1];
    double best = -1.0;
    for (int i : extremes) {
      for (int j : extremes) {
        const double d = (points_[i] - points_[j]).squaredNorm();
        if (d > best) {
          best = d;
          a = i;
          b = j;
        }
      }
    }
    if (!(std::sqrt(best) > eps_)) throw DegenerateGeometryError("convex hull: all points coincide");

    const Vec3 dir = (points_[b] - points_[a]).normalized();
    int c = -1;
    best = eps_;
    for (int i = 0; i < n; ++i) {
      const Vec3 ap = points_[i] - points_[a];
      const double d = (ap - ap.dot(dir) * dir).norm();
      if (d > best) {
        best = d;
        c = i;
      }
    }
    if (c < 0) throw DegenerateGeometryError("convex hull: all points are collinear");

    const Vec3 n0 = (points_[b] - points_[a]).cross(points_[c] - points_[a]).normalized();
    int d = -1;
    best = eps_;
    for (int i = 0; i < n; ++i) {
      const double dist = std::abs(n0.dot(points_[i] - points_[a]));
      if (dist > best) {
        best = dist;
        d = i;
      }
    }
    if (d < 0) throw DegenerateGeometryError("convex hull: all points are coplanar");

    if (n0.dot(points_[d] - points_[a]) > 0.0) std::swap(b, c);
    // Now d lies below plane (a, b, c); wind every face outward.
    make_face(a, b, c);
    make_face(a, d, b);
    make_face(b, d, c);
    make_face(c, d, a);

    for (int i = 0; i < n; ++i) {
      if (i == a || i == b || i == c || i == d) continue;
      assign(i, {0, 1, 2, 3});
    }
  }

  void assign(int p, const std::vector<int>& candidates) {
    for (int f : candidates) {
      if (plane(faces_[f], p) > eps_) {
        faces_[f].outside.push_back(p);
        return;
      }
    }
  }

  void add_point(int face_id) {
    auto& start = faces_[face_id];
    int eye = start.outside.front();
    double far = plane(start, eye);
    for (int p : start.outside) {
      const double d = plane(start, p);
      if (d > far) {
        far = d;
        eye = p;
      }
    }

    // Visible set grown from the seed face across shared edges.
    std::vector<int> visible{face_id};
    std::vector<char> seen(faces_.size(), 0);
    seen[face_id] = 1;
    std::vector<std::pair<int, int>> horizon;
    for (std::size_t k = 0; k < visible.size(); ++k) {
      const auto f = faces_[visible[k]].v;
      for (int e = 0; e < 3; ++e) {
        const int u = f[e];
        const int w = f[(e + 1) % 3];
        const int twin = edges_.at({w, u});
        if (seen[twin] == 1) continue;
        if (seen[twin] == 0 && plane(faces_[twin], eye) > eps_) {
          seen[twin] = 1;
          visible.push_back(twin);
        } else {
          seen[twin] = 2;
        }
      }
    }
    for (int f : visible) {
      const auto v = faces_[f].v;
      for (int e = 0; e < 3; ++e) {
        const int u = v[e];
        const int w = v[(e + 1) % 3];
        if (seen[edges_.at({w, u})] != 1) horizon.emplace_back(u, w);
      }
    }

    std::vector<int> orphans;
    for (int f : visible) {
      faces_[f].alive = false;
      for (int p : faces_[f].outside) {
        if (p != eye) orphans.push_back(p);
      }
      faces_[f].outside.clear();
      faces_[f].outside.shrink_to_fit();
      for (int e = 0; e < 3; ++e) edges_.erase({faces_[f].v[e], faces_[f].v[(e + 1) % 3]});
    }

    std::vector<int> created;
    created.reserve(horizon.size());
    for (const auto& [u, w] : horizon) created.push_back(make_face(u, w, eye));
    std::sort(orphans.begin(), orphans.end());
    for (int p : orphans) assign(p, created);
  }

  ConvexPart extract() const {
    std::vector<int> remap(points_.size(), -1);
    std::vector<Vec3> vertices;
    std::vector<ConvexPart::Face> faces;
    for (const auto& f : faces_) {
      if (!f.alive) continue;
      ConvexPart::Face out{};
      for (int k = 0; k < 3; ++k) {
        if (remap[f.v[k]] < 0) {
          remap[f.v[k]] = static_cast<int>(vertices.size());
          vertices.push_back(points_[f.v[k]]);
        }
        out[k] = remap[f.v[k]];
      }
      faces.push_back(out);
    }
    return ConvexPart(std::move(vertices), std::move(faces));
  }

  std::span<const Vec3> points_;
  double eps_;
  std::vector<HullFace> faces_;
  std::map<std::pair<int, int>, int> edges_;
};

}  // namespace

ConvexPart convex_hull(std::span<const Vec3> points) {
  if (points.size() < 4) throw StructuralInputError("convex hull: needs at least 4 points");
  Eigen::AlignedBox3d box;
  box.setEmpty();
  for (const auto& p : points) {
    if (!p.allFinite()) throw StructuralInputError("convex hull: non-finite input point");
    box.extend(p);
  }
  // Relative tolerance, well below the 1e-9 m containment guarantee.
  const double eps = 1e-12 * std::max(1.0, box.diagonal().norm());
  return HullBuilder(points, eps).build();
}

ConvexPart make_box(const Vec3& half_extents, const Vec3& center) {
  std::vector<Vec3> corners;
  for (int i = 0; i < 8; ++i) {
    corners.emplace_back(center + Vec3((i & 1) ? half_extents.x() : -half_extents.x(),
                                       (i & 2) ? half_extents.y() : -half_extents.y(),
                                       (i & 4) ? half_extents.z() : -half_extents.z()));
  }
  return convex_hull(corners);
}

ConvexPart make_regular_prism(int sides, double circumradius, double half_height, const Vec3& center) {
  if (sides < 3) throw StructuralInputError("prism: needs at least 3 sides");
  std::vector<Vec3> corners;
  for (int i = 0; i < sides; ++i) {
    const double a = 2.0 * std::numbers::pi * i / sides;
    for (double z : {-half_height, half_height}) {
      corners.emplace_back(center + Vec3(circumradius * std::cos(a), circumradius * std::sin(a), z));
    }
  }
  return convex_hull(corners);
}

}  // namespace regrasp
