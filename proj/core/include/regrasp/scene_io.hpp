#pragma once

#include <filesystem>
#include <string>

#include "regrasp/planner.hpp"

namespace regrasp {

/// Current document version written into every JSON file.
inline constexpr int kFormatVersion = 1;

// All loaders throw LoadError naming the offending field (or the parser's
// line/column) and never return partially-filled values. Lengths are
// meters and angles radians throughout.

HandModel load_hand(const std::filesystem::path& path);
HandModel parse_hand(const std::string& json_text);
void save_hand(const HandModel& hand, const std::filesystem::path& path);
std::string hand_to_json(const HandModel& hand);

/// JSON (one or more convex parts) or Wavefront OBJ (a single convex part).
ObjectModel load_object(const std::filesystem::path& path);
ObjectModel parse_object(const std::string& json_text);
ObjectModel parse_obj(const std::string& obj_text, const std::string& name);
void save_object(const ObjectModel& object, const std::filesystem::path& path);
std::string object_to_json(const ObjectModel& object);

/// Loads and fully validates a scene. Hand and object may be inline
/// documents or paths relative to the scene file. Missing parameters take
/// the planner defaults.
Scene load_scene(const std::filesystem::path& path);
Scene parse_scene(const std::string& json_text, const std::filesystem::path& base_dir = {});
/// Writes a self-contained scene (hand and object inline).
void save_scene(const Scene& scene, const std::filesystem::path& path);
std::string scene_to_json(const Scene& scene);

void save_plan(const Plan& plan, const std::filesystem::path& path);
Plan load_plan(const std::filesystem::path& path);
std::string plan_to_json(const Plan& plan);
Plan parse_plan(const std::string& json_text);

/// CSV with columns iteration,max_error_m,avg_error_m,phase.
void write_metrics_csv(const Plan& plan, const std::filesystem::path& path);
std::string metrics_csv(const Plan& plan);

/// Wavefront OBJ export of a convex part.
void write_obj(const ConvexPart& part, const std::filesystem::path& path);
std::string part_to_obj(const ConvexPart& part);

}  // namespace regrasp
