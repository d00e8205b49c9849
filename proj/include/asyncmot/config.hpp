#pragma once

#include <array>
#include <map>
#include <string>

namespace asyncmot {

enum class ScoreStrategy { noisy_or, average, ema, max };
enum class LifecycleMode { score, count };
enum class AlignmentMetric { iou, giou, euclidean };

const char* to_string(ScoreStrategy s);
const char* to_string(LifecycleMode m);
const char* to_string(AlignmentMetric m);
/// Throw ValidationError on an unknown name.
ScoreStrategy parse_score_strategy(const std::string& name);
LifecycleMode parse_lifecycle_mode(const std::string& name);
AlignmentMetric parse_alignment_metric(const std::string& name);

/// Kalman noise model. Measurement noise is R = gamma^n * C with n = 0 for
/// sync observations and n = 1 for camera-only observations.
struct NoiseConfig {
  /// Diagonal of C over (x, y, z, w, l, h, yaw).
  std::array<double, 7> measurement_var{0.25, 0.25, 0.25, 0.04, 0.04, 0.04, 0.05};
  double gamma = 100.0;
  /// White-noise acceleration density for the BEV constant-velocity block.
  double accel_psd = 2.0;
  /// Random-walk densities for z, box size and heading.
  double z_psd = 0.05;
  double size_psd = 0.005;
  double yaw_psd = 0.05;
  /// Initial covariance diagonal over (x, y, z, w, l, h, yaw, vx, vy).
  std::array<double, 9> initial_var{0.25, 0.25, 0.25, 0.04, 0.04, 0.04, 0.05, 25.0, 25.0};

  void validate() const;
};

struct ScoreConfig {
  double decay_sync = 0.7;
  double decay_async = 0.7;
  double alpha = 0.4;
  double beta = 0.5;
  double delete_threshold = 0.1;
  ScoreStrategy strategy = ScoreStrategy::noisy_or;
  /// Weight on the prior for the EMA strategy.
  double ema_weight = 0.5;
  /// Number of posterior scores in the online average; 0 means the whole lifetime.
  int average_window = 0;

  void validate() const;
};

/// Everything that may differ per object class.
struct ClassParams {
  double score_filter = 0.1;
  double nms_iou = 0.08;
  /// Association gates in cost space (cost = 1 - similarity).
  double gate_mix = 1.4;
  double gate_pure3d = 1.4;
  double gate_pure2d = 0.9;
  double dim_min = 0.1;
  double dim_max = 20.0;
  NoiseConfig noise;
  ScoreConfig score;

  void validate() const;
};

struct AlignConfig {
  bool enabled = true;
  AlignmentMetric metric = AlignmentMetric::iou;
  double max_center_shift = 2.0;
  double max_yaw_shift = 0.5;
  /// Each box dimension stays within this fraction of its detected value.
  double max_size_change = 0.3;
  int max_iterations = 50;
  double tolerance = 1e-6;
  double fd_step_position = 1e-3;
  double fd_step_yaw = 1e-3;

  void validate() const;
};

struct MatchingConfig {
  /// false: one 3D-only association stage over mix and pure 3D detections.
  bool cascade = true;
  bool mix_phase = true;
  bool pure3d_phase = true;
  bool pure2d_phase = true;
  bool spawn_from_pure3d = true;
  /// 2D IoU above which a projected 3D detection pairs with a 2D detection.
  double mix_iou_gate = 0.3;

  void validate() const;
};

struct LifecycleConfig {
  LifecycleMode mode = LifecycleMode::score;
  /// Count mode: consecutive unmatched frames before termination.
  int max_misses = 3;

  void validate() const;
};

/// Online check of each camera's extrinsics. A camera whose projections of
/// confident 3D detections stop meeting its own 2D detections is excluded from
/// alignment and camera-only matching. Only past sync frames are counted.
struct CalibrationCheckConfig {
  bool enabled = true;
  /// Smoothed fraction of confident projections that pair with a 2D detection.
  double min_agreement = 0.5;
  /// 3D detections below this score are not counted.
  double min_score = 0.5;
  /// Pseudo-counts of full agreement added before any frame is seen.
  double prior_count = 4.0;

  void validate() const;
};

struct TrackerConfig {
  ClassParams defaults;
  /// Fully resolved per-class parameters; classes not listed use `defaults`.
  std::map<std::string, ClassParams> classes;
  AlignConfig alignment;
  MatchingConfig matching;
  LifecycleConfig lifecycle;
  CalibrationCheckConfig calibration;
  /// Process camera-only frames; false drops them before tracking.
  bool use_async = true;
  /// Include snapshots taken at async frames in scene output.
  bool emit_async_snapshots = false;

  const ClassParams& params(const std::string& label) const;
  void validate() const;
};

}  // namespace asyncmot
