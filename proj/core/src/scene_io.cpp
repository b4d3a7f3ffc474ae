#include "regrasp/scene_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>

#include <json.hpp>

#include "regrasp/errors.hpp"

namespace regrasp {

using nlohmann::json;

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError("cannot open '" + path.string() + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw LoadError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw LoadError("failed writing '" + path.string() + "'");
}

json parse_json(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw LoadError(what + ": " + e.what());
  }
}

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }
std::string index(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

// ---------------------------------------------------------------------------
// Strict readers

const json& expect_object(const json& j, const std::string& path) {
  if (!j.is_object()) throw LoadError("expected an object", path);
  return j;
}

const json& expect_array(const json& j, const std::string& path) {
  if (!j.is_array()) throw LoadError("expected an array", path);
  return j;
}

void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& path) {
  expect_object(j, path);
  const std::set<std::string> keys(allowed.begin(), allowed.end());
  for (const auto& [key, value] : j.items()) {
    if (!keys.contains(key)) throw LoadError("unknown field '" + key + "'", path);
  }
}

const json& required(const json& j, const char* key, const std::string& path) {
  const auto it = j.find(key);
  if (it == j.end()) throw LoadError("missing required field", join(path, key));
  return *it;
}

double read_number(const json& j, const std::string& path) {
  if (!j.is_number()) throw LoadError("expected a number", path);
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw LoadError("expected a finite number", path);
  return v;
}

int read_int(const json& j, const std::string& path) {
  if (!j.is_number_integer()) throw LoadError("expected an integer", path);
  return j.get<int>();
}

std::string read_string(const json& j, const std::string& path) {
  if (!j.is_string()) throw LoadError("expected a string", path);
  return j.get<std::string>();
}

Vec3 read_vec3(const json& j, const std::string& path) {
  expect_array(j, path);
  if (j.size() != 3) throw LoadError("expected 3 numbers", path);
  return {read_number(j[0], index(path, 0)), read_number(j[1], index(path, 1)), read_number(j[2], index(path, 2))};
}

std::vector<Vec3> read_vec3_list(const json& j, const std::string& path) {
  expect_array(j, path);
  std::vector<Vec3> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(read_vec3(j[i], index(path, i)));
  return out;
}

RigidTransform read_transform(const json& j, const std::string& path) {
  check_keys(j, {"position", "quaternion"}, path);
  const Vec3 t = read_vec3(required(j, "position", path), join(path, "position"));
  const json& q = required(j, "quaternion", path);
  const std::string qpath = join(path, "quaternion");
  expect_array(q, qpath);
  if (q.size() != 4) throw LoadError("expected [w, x, y, z]", qpath);
  const Eigen::Quaterniond quat(read_number(q[0], index(qpath, 0)), read_number(q[1], index(qpath, 1)),
                                read_number(q[2], index(qpath, 2)), read_number(q[3], index(qpath, 3)));
  if (!(std::abs(quat.norm() - 1.0) <= 1e-6)) throw LoadError("quaternion must have unit norm", qpath);
  return RigidTransform(quat, t);
}

void check_version(const json& j, const std::string& what) {
  const int version = read_int(required(j, "format_version", ""), "format_version");
  if (version != kFormatVersion) {
    throw LoadError(what + " format_version " + std::to_string(version) + " is not supported", "format_version");
  }
}

void check_units(const json& j) {
  const auto it = j.find("units");
  if (it == j.end()) return;
  check_keys(*it, {"length", "angle"}, "units");
  if (it->contains("length") && read_string((*it)["length"], "units.length") != "m") {
    throw LoadError("all lengths must be in meters", "units.length");
  }
  if (it->contains("angle") && read_string((*it)["angle"], "units.angle") != "rad") {
    throw LoadError("all angles must be in radians", "units.angle");
  }
}

// ---------------------------------------------------------------------------
// Writers

json vec3_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

json vec3_list_json(const std::vector<Vec3>& list) {
  json out = json::array();
  for (const auto& v : list) out.push_back(vec3_json(v));
  return out;
}

json transform_json(const RigidTransform& t) {
  const auto& q = t.quaternion();
  return {{"position", vec3_json(t.translation())}, {"quaternion", json::array({q.w(), q.x(), q.y(), q.z()})}};
}

json joints_json(const JointConfig& config) {
  json out = json::array();
  for (const auto& a : config.angles) {
    json row = json::array();
    for (Eigen::Index i = 0; i < a.size(); ++i) row.push_back(a[i]);
    out.push_back(row);
  }
  return out;
}

JointConfig read_joints(const json& j, const std::string& path) {
  expect_array(j, path);
  JointConfig out;
  for (std::size_t f = 0; f < j.size(); ++f) {
    const std::string fpath = index(path, f);
    expect_array(j[f], fpath);
    Eigen::VectorXd row(static_cast<Eigen::Index>(j[f].size()));
    for (std::size_t k = 0; k < j[f].size(); ++k) row[static_cast<Eigen::Index>(k)] = read_number(j[f][k], index(fpath, k));
    out.angles.push_back(row);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Hand

HandModel hand_from_json(const json& doc) {
  check_keys(doc, {"format_version", "name", "units", "fingers", "finger_roles"}, "");
  check_version(doc, "hand");
  check_units(doc);
  const std::string name = doc.contains("name") ? read_string(doc["name"], "name") : "hand";
  const json& fingers_json = expect_array(required(doc, "fingers", ""), "fingers");

  std::vector<FingerModel> fingers;
  for (std::size_t f = 0; f < fingers_json.size(); ++f) {
    const std::string fpath = index("fingers", f);
    const json& fj = fingers_json[f];
    check_keys(fj, {"name", "base_transform", "joints", "link_proxies", "tip_offset"}, fpath);
    FingerModel finger;
    finger.name = fj.contains("name") ? read_string(fj["name"], join(fpath, "name")) : "finger" + std::to_string(f);
    finger.base_transform = read_transform(required(fj, "base_transform", fpath), join(fpath, "base_transform"));
    finger.tip_offset = read_transform(required(fj, "tip_offset", fpath), join(fpath, "tip_offset"));
    const json& joints = expect_array(required(fj, "joints", fpath), join(fpath, "joints"));
    for (std::size_t k = 0; k < joints.size(); ++k) {
      const std::string jpath = index(join(fpath, "joints"), k);
      check_keys(joints[k], {"axis", "limits", "parent_offset"}, jpath);
      JointSpec spec;
      Vec3 axis = read_vec3(required(joints[k], "axis", jpath), join(jpath, "axis"));
      if (!(std::abs(axis.norm() - 1.0) <= 1e-6)) throw LoadError("joint axis must have unit norm", join(jpath, "axis"));
      spec.axis = axis.normalized();
      const json& limits = expect_array(required(joints[k], "limits", jpath), join(jpath, "limits"));
      if (limits.size() != 2) throw LoadError("expected [min, max]", join(jpath, "limits"));
      spec.limit_min = read_number(limits[0], join(jpath, "limits[0]"));
      spec.limit_max = read_number(limits[1], join(jpath, "limits[1]"));
      if (!(spec.limit_min <= spec.limit_max)) throw LoadError("limit min exceeds max", join(jpath, "limits"));
      spec.parent_transform =
          read_transform(required(joints[k], "parent_offset", jpath), join(jpath, "parent_offset"));
      finger.joints.push_back(spec);
    }
    if (fj.contains("link_proxies")) {
      const std::string lpath = join(fpath, "link_proxies");
      const json& links = expect_array(fj["link_proxies"], lpath);
      if (links.size() > finger.joints.size()) throw LoadError("more proxy lists than links", lpath);
      for (std::size_t l = 0; l < links.size(); ++l) {
        const std::string llpath = index(lpath, l);
        std::vector<LinkProxy> proxies;
        for (std::size_t s = 0; s < expect_array(links[l], llpath).size(); ++s) {
          const std::string spath = index(llpath, s);
          check_keys(links[l][s], {"center", "radius"}, spath);
          LinkProxy proxy;
          proxy.local_center = read_vec3(required(links[l][s], "center", spath), join(spath, "center"));
          proxy.radius = read_number(required(links[l][s], "radius", spath), join(spath, "radius"));
          if (!(proxy.radius > 0.0)) throw LoadError("radius must be positive", join(spath, "radius"));
          proxies.push_back(proxy);
        }
        finger.link_proxies.push_back(std::move(proxies));
      }
    }
    fingers.push_back(std::move(finger));
  }

  std::map<std::string, int> roles;
  if (doc.contains("finger_roles")) {
    check_keys(doc["finger_roles"], {"index", "middle", "ring", "thumb"}, "finger_roles");
    for (const auto& [role, value] : doc["finger_roles"].items()) {
      roles[role] = read_int(value, join("finger_roles", role));
    }
  }
  try {
    return HandModel(name, std::move(fingers), std::move(roles));
  } catch (const StructuralInputError& e) {
    throw LoadError(e.what(), "fingers");
  }
}

json hand_json(const HandModel& hand) {
  json fingers = json::array();
  for (const auto& finger : hand.fingers()) {
    json joints = json::array();
    for (const auto& joint : finger.joints) {
      joints.push_back({{"axis", vec3_json(joint.axis)},
                        {"limits", json::array({joint.limit_min, joint.limit_max})},
                        {"parent_offset", transform_json(joint.parent_transform)}});
    }
    json links = json::array();
    for (const auto& link : finger.link_proxies) {
      json proxies = json::array();
      for (const auto& p : link) proxies.push_back({{"center", vec3_json(p.local_center)}, {"radius", p.radius}});
      links.push_back(proxies);
    }
    fingers.push_back({{"name", finger.name},
                       {"base_transform", transform_json(finger.base_transform)},
                       {"joints", joints},
                       {"link_proxies", links},
                       {"tip_offset", transform_json(finger.tip_offset)}});
  }
  json doc = {{"format_version", kFormatVersion}, {"name", hand.name()}, {"fingers", fingers}};
  if (!hand.roles().empty()) {
    json roles = json::object();
    for (const auto& [role, idx] : hand.roles()) roles[role] = idx;
    doc["finger_roles"] = roles;
  }
  return doc;
}

// ---------------------------------------------------------------------------
// Object

ObjectModel object_from_json(const json& doc) {
  check_keys(doc, {"format_version", "name", "units", "parts"}, "");
  check_version(doc, "object");
  check_units(doc);
  ObjectModel obj;
  obj.name = doc.contains("name") ? read_string(doc["name"], "name") : "object";
  const json& parts = expect_array(required(doc, "parts", ""), "parts");
  if (parts.empty()) throw LoadError("needs at least one convex part", "parts");
  for (std::size_t p = 0; p < parts.size(); ++p) {
    const std::string ppath = index("parts", p);
    check_keys(parts[p], {"vertices", "faces", "normals"}, ppath);
    std::vector<Vec3> vertices = read_vec3_list(required(parts[p], "vertices", ppath), join(ppath, "vertices"));
    const json& faces_json = expect_array(required(parts[p], "faces", ppath), join(ppath, "faces"));
    std::vector<ConvexPart::Face> faces;
    for (std::size_t f = 0; f < faces_json.size(); ++f) {
      const std::string fpath = index(join(ppath, "faces"), f);
      expect_array(faces_json[f], fpath);
      if (faces_json[f].size() != 3) throw LoadError("faces must be triangles", fpath);
      faces.push_back({read_int(faces_json[f][0], fpath), read_int(faces_json[f][1], fpath),
                       read_int(faces_json[f][2], fpath)});
    }
    std::vector<Vec3> normals;
    if (parts[p].contains("normals")) normals = read_vec3_list(parts[p]["normals"], join(ppath, "normals"));
    try {
      obj.parts.emplace_back(std::move(vertices), std::move(faces), std::move(normals));
    } catch (const Error& e) {
      throw LoadError(e.what(), ppath);
    }
  }
  return obj;
}

json object_json(const ObjectModel& obj) {
  json parts = json::array();
  for (const auto& part : obj.parts) {
    json faces = json::array();
    for (const auto& f : part.faces()) faces.push_back(json::array({f[0], f[1], f[2]}));
    parts.push_back({{"vertices", vec3_list_json(part.vertices())}, {"faces", faces}});
  }
  return {{"format_version", kFormatVersion}, {"name", obj.name}, {"parts", parts}};
}

// ---------------------------------------------------------------------------
// Parameters

json params_json(const PlannerParams& p) {
  return {{"zeta", p.zeta},
          {"max_iterations", p.max_iterations},
          {"stall_epsilon", p.stall_epsilon},
          {"eta", p.gait.eta},
          {"beta", p.gait.beta},
          {"surface_tol", p.gait.surface_tol},
          {"k1", p.repose.k1},
          {"k2", p.repose.k2},
          {"variant", to_string(p.repose.variant)},
          {"lambda_rot", p.repose.lambda_rot},
          {"slip_max", p.repose.slip_max},
          {"workspace_voxel", p.workspace_voxel},
          {"workspace_samples", p.workspace_samples},
          {"feas_tol", p.solver.feas_tol},
          {"opt_tol", p.solver.opt_tol},
          {"max_outer", p.solver.max_outer},
          {"max_inner", p.solver.max_inner}};
}

PlannerParams params_from_json(const json& j, const std::string& path) {
  check_keys(j,
             {"zeta", "max_iterations", "stall_epsilon", "eta", "beta", "surface_tol", "k1", "k2", "variant",
              "lambda_rot", "slip_max", "workspace_voxel", "workspace_samples", "feas_tol", "opt_tol", "max_outer",
              "max_inner"},
             path);
  PlannerParams p;
  auto number = [&](const char* key, double& target) {
    if (j.contains(key)) target = read_number(j[key], join(path, key));
  };
  auto integer = [&](const char* key, int& target) {
    if (j.contains(key)) target = read_int(j[key], join(path, key));
  };
  number("zeta", p.zeta);
  integer("max_iterations", p.max_iterations);
  number("stall_epsilon", p.stall_epsilon);
  number("eta", p.gait.eta);
  number("beta", p.gait.beta);
  number("surface_tol", p.gait.surface_tol);
  number("k1", p.repose.k1);
  number("k2", p.repose.k2);
  number("lambda_rot", p.repose.lambda_rot);
  number("slip_max", p.repose.slip_max);
  number("workspace_voxel", p.workspace_voxel);
  integer("workspace_samples", p.workspace_samples);
  number("feas_tol", p.solver.feas_tol);
  number("opt_tol", p.solver.opt_tol);
  integer("max_outer", p.solver.max_outer);
  integer("max_inner", p.solver.max_inner);
  if (j.contains("variant")) {
    try {
      p.repose.variant = repose_variant_from_string(read_string(j["variant"], join(path, "variant")));
    } catch (const StructuralInputError& e) {
      throw LoadError(e.what(), join(path, "variant"));
    }
  }
  p.repose.beta = p.gait.beta;
  p.repose.surface_tol = p.gait.surface_tol;
  try {
    p.validate();
  } catch (const StructuralInputError& e) {
    throw LoadError(e.what(), path);
  }
  return p;
}

// ---------------------------------------------------------------------------
// Scene

Scene scene_from_json(const json& doc, const std::filesystem::path& base_dir) {
  check_keys(doc,
             {"format_version", "name", "units", "hand", "object", "initial_joint_config", "initial_pose",
              "goal_contacts_object_frame", "goal_pose", "params"},
             "");
  check_version(doc, "scene");
  check_units(doc);

  Scene scene;
  scene.name = doc.contains("name") ? read_string(doc["name"], "name") : "scene";

  const json& hand = required(doc, "hand", "");
  if (hand.is_string()) {
    const auto path = base_dir / hand.get<std::string>();
    try {
      scene.hand = load_hand(path);
    } catch (const LoadError& e) {
      throw LoadError(std::string("in ") + path.string() + ": " + e.what(), "hand");
    }
  } else {
    scene.hand = hand_from_json(hand);
  }
  const json& object = required(doc, "object", "");
  if (object.is_string()) {
    const auto path = base_dir / object.get<std::string>();
    try {
      scene.object = load_object(path);
    } catch (const LoadError& e) {
      throw LoadError(std::string("in ") + path.string() + ": " + e.what(), "object");
    }
  } else {
    scene.object = object_from_json(object);
  }

  scene.initial_joints = read_joints(required(doc, "initial_joint_config", ""), "initial_joint_config");
  try {
    scene.initial_joints.check_shape(scene.hand);
  } catch (const StructuralInputError& e) {
    throw LoadError(e.what(), "initial_joint_config");
  }
  if (!scene.initial_joints.within_limits(scene.hand)) {
    throw LoadError("initial joint configuration violates joint limits", "initial_joint_config");
  }
  scene.initial_pose = read_transform(required(doc, "initial_pose", ""), "initial_pose");
  scene.goal_contacts_object =
      read_vec3_list(required(doc, "goal_contacts_object_frame", ""), "goal_contacts_object_frame");
  scene.goal_pose = read_transform(required(doc, "goal_pose", ""), "goal_pose");
  if (doc.contains("params")) scene.params = params_from_json(doc["params"], "params");

  if (static_cast<int>(scene.goal_contacts_object.size()) != scene.hand.finger_count()) {
    throw LoadError("expected one goal contact per finger", "goal_contacts_object_frame");
  }
  const double tol = scene.params.gait.surface_tol;
  for (std::size_t i = 0; i < scene.goal_contacts_object.size(); ++i) {
    const double sd = signed_distance_object(scene.goal_contacts_object[i], scene.object, RigidTransform());
    if (!(std::abs(sd) <= tol)) {
      std::ostringstream os;
      os << "goal contact is " << sd << " m from the object surface (tolerance " << tol << ")";
      throw LoadError(os.str(), index("goal_contacts_object_frame", i));
    }
  }
  const Grasp grasp = scene.initial_state().grasp;
  for (std::size_t i = 0; i < grasp.contacts_palm.size(); ++i) {
    const double sd = signed_distance_object(grasp.contacts_palm[i], scene.object, scene.initial_pose);
    if (!(std::abs(sd) <= tol)) {
      std::ostringstream os;
      os << "fingertip " << i << " is " << sd << " m from the object surface at the initial pose";
      throw LoadError(os.str(), index("initial_joint_config", i));
    }
  }
  try {
    scene.validate();
  } catch (const Error& e) {
    throw LoadError(e.what());
  }
  return scene;
}

// ---------------------------------------------------------------------------
// Plan

json plan_json(const Plan& plan) {
  json steps = json::array();
  for (const auto& s : plan.steps) {
    steps.push_back({{"kind", to_string(s.kind)},
                     {"finger", s.finger ? json(*s.finger) : json(nullptr)},
                     {"iteration", s.iteration},
                     {"accepted", s.accepted},
                     {"joint_angles", joints_json(s.joints)},
                     {"object_pose", transform_json(s.grasp.object_pose)},
                     {"contacts_palm", vec3_list_json(s.grasp.contacts_palm)},
                     {"contacts_object", vec3_list_json(s.grasp.contacts_object)},
                     {"max_error_m", s.max_error},
                     {"avg_error_m", s.avg_error},
                     {"solver_status", to_string(s.solver_status)}});
  }
  return {{"format_version", kFormatVersion},
          {"scene", plan.scene},
          {"params", params_json(plan.params)},
          {"status", to_string(plan.status)},
          {"iterations", plan.iterations},
          {"wall_time_s", plan.wall_time},
          {"repose_stats",
           {{"calls", plan.repose_stats.calls},
            {"objective_evals", plan.repose_stats.objective_evals},
            {"constraint_evals", plan.repose_stats.constraint_evals},
            {"e_des_terms", plan.repose_stats.e_des_terms}}},
          {"steps", steps}};
}

Plan plan_from_json(const json& doc) {
  check_keys(doc,
             {"format_version", "scene", "params", "status", "iterations", "wall_time_s", "repose_stats", "steps"},
             "");
  check_version(doc, "plan");
  Plan plan;
  plan.scene = read_string(required(doc, "scene", ""), "scene");
  plan.params = params_from_json(required(doc, "params", ""), "params");
  try {
    plan.status = plan_status_from_string(read_string(required(doc, "status", ""), "status"));
  } catch (const StructuralInputError& e) {
    throw LoadError(e.what(), "status");
  }
  plan.iterations = read_int(required(doc, "iterations", ""), "iterations");
  plan.wall_time = read_number(required(doc, "wall_time_s", ""), "wall_time_s");
  if (doc.contains("repose_stats")) {
    const json& rs = doc["repose_stats"];
    check_keys(rs, {"calls", "objective_evals", "constraint_evals", "e_des_terms"}, "repose_stats");
    plan.repose_stats.calls = read_int(required(rs, "calls", "repose_stats"), "repose_stats.calls");
    auto count = [&](const char* key) -> std::int64_t {
      const json& v = required(rs, key, "repose_stats");
      if (!v.is_number_integer()) throw LoadError("expected an integer", join("repose_stats", key));
      return v.get<std::int64_t>();
    };
    plan.repose_stats.objective_evals = count("objective_evals");
    plan.repose_stats.constraint_evals = count("constraint_evals");
    plan.repose_stats.e_des_terms = count("e_des_terms");
  }
  const json& steps = expect_array(required(doc, "steps", ""), "steps");
  for (std::size_t k = 0; k < steps.size(); ++k) {
    const std::string spath = index("steps", k);
    const json& s = steps[k];
    check_keys(s,
               {"kind", "finger", "iteration", "accepted", "joint_angles", "object_pose", "contacts_palm",
                "contacts_object", "max_error_m", "avg_error_m", "solver_status"},
               spath);
    PlanStep step;
    try {
      step.kind = step_kind_from_string(read_string(required(s, "kind", spath), join(spath, "kind")));
      step.solver_status =
          solve_status_from_string(read_string(required(s, "solver_status", spath), join(spath, "solver_status")));
    } catch (const StructuralInputError& e) {
      throw LoadError(e.what(), spath);
    }
    const json& finger = required(s, "finger", spath);
    if (!finger.is_null()) step.finger = read_int(finger, join(spath, "finger"));
    step.iteration = read_int(required(s, "iteration", spath), join(spath, "iteration"));
    const json& accepted = required(s, "accepted", spath);
    if (!accepted.is_boolean()) throw LoadError("expected a boolean", join(spath, "accepted"));
    step.accepted = accepted.get<bool>();
    step.joints = read_joints(required(s, "joint_angles", spath), join(spath, "joint_angles"));
    step.grasp.object_pose = read_transform(required(s, "object_pose", spath), join(spath, "object_pose"));
    step.grasp.contacts_palm = read_vec3_list(required(s, "contacts_palm", spath), join(spath, "contacts_palm"));
    step.grasp.contacts_object =
        read_vec3_list(required(s, "contacts_object", spath), join(spath, "contacts_object"));
    step.max_error = read_number(required(s, "max_error_m", spath), join(spath, "max_error_m"));
    step.avg_error = read_number(required(s, "avg_error_m", spath), join(spath, "avg_error_m"));
    plan.steps.push_back(std::move(step));
  }
  return plan;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

// ---------------------------------------------------------------------------
// Public API

HandModel parse_hand(const std::string& json_text) { return hand_from_json(parse_json(json_text, "hand")); }

HandModel load_hand(const std::filesystem::path& path) { return parse_hand(read_file(path)); }

std::string hand_to_json(const HandModel& hand) { return hand_json(hand).dump(2) + "\n"; }

void save_hand(const HandModel& hand, const std::filesystem::path& path) { write_file(path, hand_to_json(hand)); }

std::string object_to_json(const ObjectModel& object) { return object_json(object).dump(2) + "\n"; }

void save_object(const ObjectModel& object, const std::filesystem::path& path) {
  write_file(path, object_to_json(object));
}

ObjectModel parse_object(const std::string& json_text) { return object_from_json(parse_json(json_text, "object")); }

ObjectModel parse_obj(const std::string& obj_text, const std::string& name) {
  std::vector<Vec3> vertices;
  std::vector<ConvexPart::Face> faces;
  std::istringstream in(obj_text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag) || tag[0] == '#') continue;
    const std::string where = "line " + std::to_string(line_no);
    if (tag == "v") {
      double x, y, z;
      if (!(ls >> x >> y >> z)) throw LoadError("malformed vertex", where);
      vertices.emplace_back(x, y, z);
    } else if (tag == "f") {
      std::vector<int> poly;
      std::string token;
      while (ls >> token) {
        const int idx = std::stoi(token.substr(0, token.find('/')));
        const int resolved = idx > 0 ? idx - 1 : static_cast<int>(vertices.size()) + idx;
        poly.push_back(resolved);
      }
      if (poly.size() < 3) throw LoadError("face with fewer than 3 vertices", where);
      for (std::size_t k = 1; k + 1 < poly.size(); ++k) faces.push_back({poly[0], poly[k], poly[k + 1]});
    }
  }
  ObjectModel obj;
  obj.name = name;
  try {
    obj.parts.emplace_back(std::move(vertices), std::move(faces));
  } catch (const Error& e) {
    throw LoadError(e.what(), "obj");
  }
  return obj;
}

ObjectModel load_object(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  if (path.extension() == ".obj" || path.extension() == ".OBJ") return parse_obj(text, path.stem().string());
  return parse_object(text);
}

Scene parse_scene(const std::string& json_text, const std::filesystem::path& base_dir) {
  return scene_from_json(parse_json(json_text, "scene"), base_dir);
}

Scene load_scene(const std::filesystem::path& path) {
  return parse_scene(read_file(path), path.parent_path());
}

std::string scene_to_json(const Scene& scene) {
  json doc = {{"format_version", kFormatVersion},
              {"name", scene.name},
              {"hand", hand_json(scene.hand)},
              {"object", object_json(scene.object)},
              {"initial_joint_config", joints_json(scene.initial_joints)},
              {"initial_pose", transform_json(scene.initial_pose)},
              {"goal_contacts_object_frame", vec3_list_json(scene.goal_contacts_object)},
              {"goal_pose", transform_json(scene.goal_pose)},
              {"params", params_json(scene.params)}};
  return doc.dump(2) + "\n";
}

void save_scene(const Scene& scene, const std::filesystem::path& path) { write_file(path, scene_to_json(scene)); }

std::string plan_to_json(const Plan& plan) { return plan_json(plan).dump(2) + "\n"; }

Plan parse_plan(const std::string& json_text) { return plan_from_json(parse_json(json_text, "plan")); }

void save_plan(const Plan& plan, const std::filesystem::path& path) { write_file(path, plan_to_json(plan)); }

Plan load_plan(const std::filesystem::path& path) { return parse_plan(read_file(path)); }

std::string metrics_csv(const Plan& plan) {
  std::ostringstream os;
  os << "iteration,max_error_m,avg_error_m,phase\n";
  for (const auto& row : iteration_metrics(plan)) {
    os << row.iteration << "," << format_double(row.max_error) << "," << format_double(row.avg_error) << ","
       << row.phase << "\n";
  }
  return os.str();
}

void write_metrics_csv(const Plan& plan, const std::filesystem::path& path) { write_file(path, metrics_csv(plan)); }

std::string part_to_obj(const ConvexPart& part) {
  std::ostringstream os;
  os << "# convex part: " << part.vertices().size() << " vertices, " << part.faces().size() << " faces\n";
  for (const auto& v : part.vertices()) {
    os << "v " << format_double(v.x()) << " " << format_double(v.y()) << " " << format_double(v.z()) << "\n";
  }
  for (const auto& f : part.faces()) os << "f " << f[0] + 1 << " " << f[1] + 1 << " " << f[2] + 1 << "\n";
  return os.str();
}

void write_obj(const ConvexPart& part, const std::filesystem::path& path) { write_file(path, part_to_obj(part)); }

}  // namespace regrasp
