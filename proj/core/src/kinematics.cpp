#include "regrasp/kinematics.hpp"

#include <cmath>
#include <set>

#include "regrasp/errors.hpp"

namespace regrasp {

HandModel::HandModel(std::string name, std::vector<FingerModel> fingers, std::map<std::string, int> roles)
    : name_(std::move(name)), fingers_(std::move(fingers)), roles_(std::move(roles)) {
  if (fingers_.size() < 2) throw StructuralInputError("hand '" + name_ + "': needs at least 2 fingers");
  for (std::size_t f = 0; f < fingers_.size(); ++f) {
    const auto& finger = fingers_[f];
    const std::string where = "hand '" + name_ + "' finger " + std::to_string(f);
    if (finger.joints.empty()) throw StructuralInputError(where + ": needs at least one joint");
    for (std::size_t j = 0; j < finger.joints.size(); ++j) {
      const auto& joint = finger.joints[j];
      if (!(std::abs(joint.axis.norm() - 1.0) <= 1e-9)) {
        throw StructuralInputError(where + " joint " + std::to_string(j) + ": axis must have unit norm");
      }
      if (!(joint.limit_min <= joint.limit_max)) {
        throw StructuralInputError(where + " joint " + std::to_string(j) + ": limit_min exceeds limit_max");
      }
    }
    if (finger.link_proxies.size() > finger.joints.size()) {
      throw StructuralInputError(where + ": link proxies reference links past the last joint");
    }
    for (const auto& link : finger.link_proxies) {
      for (const auto& proxy : link) {
        if (!(proxy.radius > 0.0)) throw StructuralInputError(where + ": proxy radius must be positive");
      }
    }
    total_dof_ += finger.dof();
  }
  std::set<int> used;
  for (const auto& [role, index] : roles_) {
    if (index < 0 || index >= static_cast<int>(fingers_.size())) {
      throw StructuralInputError("hand '" + name_ + "': role '" + role + "' maps to a missing finger");
    }
    if (!used.insert(index).second) {
      throw StructuralInputError("hand '" + name_ + "': role mapping is not injective");
    }
  }
}

const FingerModel& HandModel::finger(int index) const {
  if (index < 0 || index >= finger_count()) {
    throw StructuralInputError("finger index " + std::to_string(index) + " out of range");
  }
  return fingers_[index];
}

std::optional<int> HandModel::role(const std::string& name) const {
  const auto it = roles_.find(name);
  if (it == roles_.end()) return std::nullopt;
  return it->second;
}

JointConfig JointConfig::Zero(const HandModel& hand) {
  JointConfig out;
  for (const auto& finger : hand.fingers()) out.angles.push_back(Eigen::VectorXd::Zero(finger.dof()));
  return out;
}

Eigen::VectorXd JointConfig::flatten() const {
  Eigen::Index n = 0;
  for (const auto& a : angles) n += a.size();
  Eigen::VectorXd out(n);
  Eigen::Index offset = 0;
  for (const auto& a : angles) {
    out.segment(offset, a.size()) = a;
    offset += a.size();
  }
  return out;
}

JointConfig JointConfig::Unflatten(const HandModel& hand, const Eigen::VectorXd& flat) {
  if (flat.size() != hand.total_dof()) throw StructuralInputError("joint vector length does not match hand dof");
  JointConfig out;
  Eigen::Index offset = 0;
  for (const auto& finger : hand.fingers()) {
    out.angles.push_back(flat.segment(offset, finger.dof()));
    offset += finger.dof();
  }
  return out;
}

void JointConfig::check_shape(const HandModel& hand) const {
  if (static_cast<int>(angles.size()) != hand.finger_count()) {
    throw StructuralInputError("joint config has " + std::to_string(angles.size()) + " fingers, hand has " +
                               std::to_string(hand.finger_count()));
  }
  for (int f = 0; f < hand.finger_count(); ++f) {
    if (angles[f].size() != hand.finger(f).dof()) {
      throw StructuralInputError("joint config finger " + std::to_string(f) + " has wrong joint count");
    }
  }
}

bool JointConfig::within_limits(const HandModel& hand, double tol) const {
  check_shape(hand);
  for (int f = 0; f < hand.finger_count(); ++f) {
    const auto& joints = hand.finger(f).joints;
    for (std::size_t j = 0; j < joints.size(); ++j) {
      const double a = angles[f][static_cast<Eigen::Index>(j)];
      if (a < joints[j].limit_min - tol || a > joints[j].limit_max + tol) return false;
    }
  }
  return true;
}

bool JointConfig::operator==(const JointConfig& other) const {
  if (angles.size() != other.angles.size()) return false;
  for (std::size_t i = 0; i < angles.size(); ++i) {
    if (angles[i].size() != other.angles[i].size() || angles[i] != other.angles[i]) return false;
  }
  return true;
}

std::vector<RigidTransform> fk_chain(const HandModel& hand, int finger, const Eigen::VectorXd& theta) {
  const auto& model = hand.finger(finger);
  if (theta.size() != model.dof()) {
    throw StructuralInputError("fk: finger " + std::to_string(finger) + " expects " + std::to_string(model.dof()) +
                               " angles, got " + std::to_string(theta.size()));
  }
  std::vector<RigidTransform> frames;
  frames.reserve(model.joints.size() + 1);
  RigidTransform current = model.base_transform;
  for (std::size_t j = 0; j < model.joints.size(); ++j) {
    const auto& joint = model.joints[j];
    current = current * joint.parent_transform *
              RigidTransform(Eigen::Quaterniond(Eigen::AngleAxisd(theta[static_cast<Eigen::Index>(j)], joint.axis)),
                             Vec3::Zero());
    frames.push_back(current);
  }
  frames.push_back(current * model.tip_offset);
  return frames;
}

RigidTransform fk_fingertip(const HandModel& hand, int finger, const Eigen::VectorXd& theta) {
  return fk_chain(hand, finger, theta).back();
}

std::vector<ProxySphere> fk_link_proxies(const HandModel& hand, int finger, const Eigen::VectorXd& theta) {
  const auto frames = fk_chain(hand, finger, theta);
  const auto& model = hand.finger(finger);
  std::vector<ProxySphere> out;
  const int last_link = model.dof() - 1;
  for (int link = 0; link < static_cast<int>(model.link_proxies.size()); ++link) {
    if (link == last_link) continue;  // fingertip link
    for (const auto& proxy : model.link_proxies[link]) {
      out.push_back({frames[link].apply(proxy.local_center), proxy.radius, link});
    }
  }
  return out;
}

std::vector<RigidTransform> fk_all_fingertips(const HandModel& hand, const JointConfig& config) {
  config.check_shape(hand);
  std::vector<RigidTransform> out;
  out.reserve(config.angles.size());
  for (int f = 0; f < hand.finger_count(); ++f) out.push_back(fk_fingertip(hand, f, config.angles[f]));
  return out;
}

Eigen::VectorXd numeric_gradient(const ScalarFunction& f, const Eigen::VectorXd& x, double h) {
  Eigen::VectorXd grad(x.size());
  Eigen::VectorXd probe = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    probe[i] = x[i] + h;
    const double up = f(probe);
    probe[i] = x[i] - h;
    const double down = f(probe);
    probe[i] = x[i];
    if (!std::isfinite(up) || !std::isfinite(down)) {
      throw NumericEvaluationError("numeric gradient: non-finite evaluation along coordinate " + std::to_string(i));
    }
    grad[i] = (up - down) / (2.0 * h);
  }
  return grad;
}

}  // namespace regrasp
