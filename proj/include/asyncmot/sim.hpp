#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "asyncmot/scene.hpp"

namespace asyncmot {

enum class MotionPattern { constant_velocity, stop_and_go, turning };

const char* to_string(MotionPattern m);
MotionPattern parse_motion_pattern(const std::string& name);

struct ObjectSpec {
  std::string label = "car";
  MotionPattern motion = MotionPattern::constant_velocity;
  double x = 10.0;
  double y = 0.0;
  double yaw = 0.0;
  double speed = 0.0;
  /// Turning: yaw rate in rad/s. Stop-and-go: full move+stop cycle in seconds.
  double turn_rate = 0.0;
  double cycle = 4.0;
  double w = 1.9;
  double l = 4.5;
  double h = 1.6;
  double spawn_time = 0.0;
  double despawn_time = std::numeric_limits<double>::infinity();
};

struct SensorNoise {
  double position = 0.0;  // meters, per axis
  double size = 0.0;      // meters, per dimension
  double yaw = 0.0;       // radians
  double pixel = 0.0;     // pixels, per rectangle coordinate
};

/// True-positive scores are drawn from a Gaussian around a per-modality mean
/// and clipped to [0.01, 1].
struct ScoreModel {
  double mean_3d = 0.8;
  double mean_2d_sync = 0.75;
  double mean_2d_async = 0.6;
  double sigma = 0.1;
};

struct ScenarioConfig {
  double duration = 10.0;
  double sync_rate = 2.0;
  double async_rate = 4.0;
  std::vector<ObjectSpec> objects;
  SensorNoise noise;
  ScoreModel scores;
  /// Per-detection miss probability.
  double lidar_dropout = 0.0;
  double camera_dropout = 0.0;
  /// Probability that a whole LiDAR sweep is missing at a keyframe.
  double lidar_frame_dropout = 0.0;
  /// Probability that a 3D score is scaled by `score_dip_factor` (occlusion).
  double score_dip_prob = 0.0;
  double score_dip_factor = 0.3;
  /// Expected false positives per frame (Poisson).
  double false_positive_rate_3d = 0.0;
  double false_positive_rate_2d = 0.0;
  double false_positive_score_min = 0.05;
  double false_positive_score_max = 0.4;
  /// Half-extent of the square region where 3D false positives appear.
  double false_positive_region = 40.0;
  double lidar_range = 60.0;
  /// Empty selects the default six-camera ring.
  std::vector<CameraModel> cameras;
  /// Std of the extrinsic miscalibration seen by the tracker.
  double extrinsic_sigma = 0.0;
  std::uint64_t seed = 0;

  /// Throws ValidationError for rates <= 0, async rate below sync rate, or
  /// probabilities outside [0, 1].
  void validate() const;
};

/// Six 1600x900 cameras at 1.6 m looking outward every 60 degrees.
std::vector<CameraModel> default_camera_rig();

/// Timestamps of sync frames (multiples of 1/sync_rate) and async frames
/// (multiples of 1/async_rate that do not coincide with a sync frame), all
/// in [0, duration).
std::vector<std::pair<double, FrameKind>> frame_schedule(const ScenarioConfig& cfg);

/// Ground-truth state of an object at time t, or nothing when it is not alive.
std::optional<GtObject> object_state(const ObjectSpec& spec, std::uint64_t id, double t);

/// Generates frames and ground truth. 2D detections come from the true
/// cameras; the frames carry the (possibly perturbed) cameras the tracker
/// believes in. Deterministic for a given config including the seed.
Scene generate(const ScenarioConfig& cfg);

/// Adds N(0, sigma^2) to each rotation (axis-angle, applied on the camera
/// side) and translation component, then re-orthonormalizes the rotation.
std::vector<CameraModel> perturb_extrinsics(const std::vector<CameraModel>& cams, double sigma,
                                            std::uint64_t seed);

/// Mixed-traffic scenario with keyframe LiDAR dropouts, occlusion score dips,
/// clutter and miscalibration `extrinsic_sigma`, used by the ablation suites.
ScenarioConfig designed_scenario(std::uint64_t seed, double extrinsic_sigma = 0.0);

/// Noiseless scenario with `n_objects` well-separated objects.
ScenarioConfig noiseless_scenario(std::uint64_t seed, int n_objects, double duration);

}  // namespace asyncmot
