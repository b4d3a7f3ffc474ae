#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <span>
#include <vector>

#include <boost/geometry.hpp>
#include <boost/geometry/index/rtree.hpp>

#include "regrasp/geometry.hpp"
#include "regrasp/grasp.hpp"
#include "regrasp/repose_opt.hpp"

namespace regrasp::test {

/// Brute-force signed distance: nearest of a dense barycentric grid of
/// surface samples, signed by face-plane containment recomputed from the
/// raw triangles.
class SampledDistanceOracle {
 public:
  SampledDistanceOracle(const ConvexPart& part, double spacing) {
    const auto& v = part.vertices();
    std::vector<Point> samples;
    for (const auto& f : part.faces()) {
      const Vec3 &a = v[f[0]], &b = v[f[1]], &c = v[f[2]];
      const double longest = std::max({(b - a).norm(), (c - b).norm(), (a - c).norm()});
      const int k = std::max(1, static_cast<int>(std::ceil(longest / spacing)));
      for (int i = 0; i <= k; ++i) {
        for (int j = 0; i + j <= k; ++j) {
          const Vec3 p = a + (b - a) * (static_cast<double>(i) / k) + (c - a) * (static_cast<double>(j) / k);
          samples.emplace_back(p.x(), p.y(), p.z());
        }
      }
      Vec3 n = (b - a).cross(c - a);
      n.normalize();
      planes_.push_back({n, n.dot(a)});
    }
    sample_count_ = samples.size();
    tree_ = Tree(samples.begin(), samples.end());
  }

  double operator()(const Vec3& p) const {
    std::vector<Point> hit;
    tree_.query(boost::geometry::index::nearest(Point(p.x(), p.y(), p.z()), 1), std::back_inserter(hit));
    const Vec3 q(hit[0].get<0>(), hit[0].get<1>(), hit[0].get<2>());
    const double d = (p - q).norm();
    double worst = -1.0;
    for (const auto& [n, off] : planes_) worst = std::max(worst, n.dot(p) - off);
    return worst > 0.0 ? d : -d;
  }

  std::size_t sample_count() const { return sample_count_; }

 private:
  using Point = boost::geometry::model::point<double, 3, boost::geometry::cs::cartesian>;
  using Tree = boost::geometry::index::rtree<Point, boost::geometry::index::quadratic<16>>;
  Tree tree_;
  std::vector<std::pair<Vec3, double>> planes_;
  std::size_t sample_count_ = 0;
};

inline ConvexPart random_hull(std::mt19937_64& rng, double radius, int points = 20) {
  std::normal_distribution<double> n(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.2, 1.0);
  std::vector<Vec3> cloud;
  for (int i = 0; i < points; ++i) {
    Vec3 d(n(rng), n(rng), n(rng));
    cloud.push_back(d.normalized() * radius * u(rng));
  }
  return convex_hull(cloud);
}

struct GridGaitOptimum {
  double distance = std::numeric_limits<double>::infinity();  ///< best |goal - tip| (m)
  Eigen::VectorXd theta;
  int feasible_cells = 0;
};

/// Exhaustive search over `n` samples per joint (inclusive of limits). Grid
/// points only approximate the constraint manifold, so each constraint is
/// relaxed by `slack`, the largest fingertip motion across half a cell.
inline GridGaitOptimum grid_gait_oracle(const HandModel& hand, const ObjectModel& obj, const HandState& state,
                                        int finger, const Vec3& goal, double eta, double beta, int n, double slack) {
  const FingerModel& f = hand.finger(finger);
  const RigidTransform& pose = state.grasp.object_pose;
  const Vec3 tip0 = fk_fingertip(hand, finger, state.joints.angles[finger]).translation();
  GridGaitOptimum best;
  int total = 1;
  for (int j = 0; j < f.dof(); ++j) total *= n;
  Eigen::VectorXd theta(f.dof());
  for (int idx = 0; idx < total; ++idx) {
    int rest = idx;
    for (int j = 0; j < f.dof(); ++j, rest /= n) {
      theta[j] = f.joints[j].limit_min + (f.joints[j].limit_max - f.joints[j].limit_min) * (rest % n) / (n - 1.0);
    }
    const Vec3 tip = fk_fingertip(hand, finger, theta).translation();
    if (std::abs(signed_distance_object(tip, obj, pose)) > slack) continue;
    if ((tip - tip0).norm() > eta + slack) continue;
    bool clear = true;
    for (const auto& proxy : fk_link_proxies(hand, finger, theta)) {
      clear = clear && signed_distance_object(proxy.center, obj, pose) - proxy.radius >= beta - slack;
    }
    if (!clear) continue;
    ++best.feasible_cells;
    const double d = (goal - tip).norm();
    if (d < best.distance) {
      best.distance = d;
      best.theta = theta;
    }
  }
  return best;
}

struct KabschCheck {
  double returned_residual = 0.0;
  double best_sampled_residual = 0.0;
};

/// Compares the closed-form residual against `samples` random rigid
/// transforms concentrated around the true solution and spread globally.
inline KabschCheck kabsch_against_samples(std::span<const Vec3> src, std::span<const Vec3> dst, int samples,
                                          std::mt19937_64& rng) {
  KabschCheck out;
  const RigidTransform t = kabsch_transform(src, dst);
  out.returned_residual = registration_residual(t, src, dst);
  out.best_sampled_residual = std::numeric_limits<double>::infinity();
  std::normal_distribution<double> n(0.0, 1.0);
  for (int s = 0; s < samples; ++s) {
    // Half of the samples perturb the returned transform, half are global.
    RigidTransform cand;
    if (s % 2 == 0) {
      const double scale = std::pow(10.0, -1.0 - 4.0 * (s % 10) / 10.0);
      Vec3 axis(n(rng), n(rng), n(rng));
      const RigidTransform d = RigidTransform::FromAxisAngle(axis.normalized(), scale * n(rng),
                                                             scale * Vec3(n(rng), n(rng), n(rng)));
      cand = d * t;
    } else {
      Eigen::Quaterniond q(n(rng), n(rng), n(rng), n(rng));
      q.normalize();
      cand = RigidTransform(q, 0.1 * Vec3(n(rng), n(rng), n(rng)));
    }
    out.best_sampled_residual = std::min(out.best_sampled_residual, registration_residual(cand, src, dst));
  }
  return out;
}

}  // namespace regrasp::test
