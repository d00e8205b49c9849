#pragma once

#include <string>
#include <vector>

#include "asyncmot/config.hpp"
#include "asyncmot/metrics.hpp"
#include "asyncmot/scene.hpp"

namespace asyncmot {

/// One dimension of an ablation matrix. The first value is the baseline.
///
/// Switches take "off"/"on": async, cascade, mix, pure3d, pure2d, align,
/// rate_aware, calibration_check.
/// Valued axes: strategy (score strategy names), align_metric (iou, giou,
/// euclidean) and sigma (extrinsic noise std applied to the scene cameras).
struct AblationAxis {
  std::string name;
  std::vector<std::string> values;
};

/// `name` with values {"off", "on"}.
AblationAxis switch_axis(const std::string& name);

/// Applies one axis setting to a config. Throws ValidationError for an
/// unknown axis or value. The sigma axis leaves the config untouched.
void apply_setting(TrackerConfig& config, const std::string& axis, const std::string& value);

/// Disables modality-aware estimation: count-based lifecycle, gamma = 1,
/// beta = 1 and the sync decay at async frames.
void disable_frequency_aware_estimation(TrackerConfig& config);

/// Copy of `scene` whose cameras (header and frames) carry extrinsic noise.
Scene perturb_scene(const Scene& scene, double sigma, std::uint64_t seed);

struct AblationRow {
  std::vector<std::string> values;  // one per axis
  EvalReport report;                // combined over scenes
  std::vector<EvalReport> per_scene;
};

/// Tracks and evaluates every scene under every combination of axis values.
/// Rows are in odometer order with the last axis varying fastest, so row 0
/// is the baseline. Runs on `threads` workers (0 selects the hardware count).
std::vector<AblationRow> run_ablation(const std::vector<Scene>& scenes, const TrackerConfig& base,
                                      const std::vector<AblationAxis>& axes,
                                      const MetricsConfig& metrics = {}, unsigned threads = 0);

/// Tracks one scene and evaluates it against its ground truth.
EvalReport track_and_evaluate(const Scene& scene, const TrackerConfig& config,
                              const MetricsConfig& metrics = {});

std::string format_ablation(const std::vector<AblationAxis>& axes,
                            const std::vector<AblationRow>& rows);

}  // namespace asyncmot
