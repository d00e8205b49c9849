#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "asyncmot/config.hpp"
#include "asyncmot/metrics.hpp"
#include "asyncmot/scene.hpp"
#include "asyncmot/sim.hpp"
#include "asyncmot/tracker.hpp"

namespace asyncmot {

inline constexpr int kFormatVersion = 1;

/// Scene files are JSON lines: one header record with the cameras, then one
/// "frame" record per timestamp, each optionally followed by its "gt" record.
/// Errors carry `source:line`. Unknown fields, malformed records and
/// non-increasing timestamps throw ValidationError.
Scene read_scene(std::istream& in, const std::string& source = "<stream>");
Scene load_scene(const std::string& path);
void write_scene(const Scene& scene, std::ostream& out);
void save_scene(const Scene& scene, const std::string& path);

/// Track dumps: a header, then per snapshot one "snapshot" record followed by
/// one "track" record per track in identity order.
std::vector<TrackSnapshot> read_tracks(std::istream& in, const std::string& source = "<stream>");
std::vector<TrackSnapshot> load_tracks(const std::string& path);
void write_tracks(const std::vector<TrackSnapshot>& snapshots, std::ostream& out,
                  const std::string& scene_id = "");
void save_tracks(const std::vector<TrackSnapshot>& snapshots, const std::string& path,
                 const std::string& scene_id = "");

/// Tracker configuration as one JSON document. Every key is required except
/// inside "classes", where each entry overrides a subset of "defaults".
/// A missing key is reported by its dotted path, e.g. "defaults.noise.gamma".
TrackerConfig parse_config(const std::string& text, const std::string& source = "<string>");
TrackerConfig load_config(const std::string& path);
std::string config_to_string(const TrackerConfig& config);

/// Scenario configuration, same conventions as the tracker configuration.
ScenarioConfig parse_scenario(const std::string& text, const std::string& source = "<string>");
ScenarioConfig load_scenario(const std::string& path);
std::string scenario_to_string(const ScenarioConfig& scenario);

std::string report_to_string(const EvalReport& report);
EvalReport parse_report(const std::string& text, const std::string& source = "<string>");

/// Reads a whole file; throws ValidationError when it cannot be opened.
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace asyncmot
