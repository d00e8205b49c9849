#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "asyncmot/config.hpp"
#include "asyncmot/detection.hpp"

namespace asyncmot {

/// State layout: x, y, z, w, l, h, yaw, vx, vy.
inline constexpr int kStateDim = 9;
inline constexpr int kBoxDim = 7;
using StateVector = Eigen::Matrix<double, kStateDim, 1>;
using StateCovariance = Eigen::Matrix<double, kStateDim, kStateDim>;

enum class TrackStatus { tentative, active, dead };

const char* to_string(TrackStatus s);
TrackStatus parse_track_status(const std::string& name);

struct Track {
  std::uint64_t id = 0;
  std::string label;
  StateVector state = StateVector::Zero();
  StateCovariance covariance = StateCovariance::Identity();
  /// Posterior score after the last processed frame (prior right after predict).
  double score = 0.0;
  /// Posterior scores, one per processed frame including the spawn frame.
  std::vector<double> score_history;
  double last_timestamp = 0.0;
  int hits = 0;
  int age = 0;
  int misses = 0;
  TrackStatus status = TrackStatus::active;

  Box3D box() const;
  Eigen::Vector2d velocity() const { return {state(7), state(8)}; }
  /// Mean of the last `window` posterior scores (all of them when window is 0).
  double average_score(int window = 0) const;
};

/// Kalman time update over `dt` seconds (constant velocity in BEV, random walk
/// on z, size and heading) followed by the score decay of `stage`.
/// Throws ValidationError when dt <= 0.
Track predict(const Track& track, double dt, FrameKind stage, const ClassParams& params);

/// Full-box measurement update with R = gamma^n * C (n = 0 sync, 1 async).
/// Throws NumericalError when the innovation covariance is not positive definite.
Track update_motion(const Track& track, const Box3D& obs, FrameKind stage,
                    const NoiseConfig& noise);

/// BEV position update with R = gamma^n * C restricted to (x, y).
Track update_motion_bev(const Track& track, const Eigen::Vector2d& obs, FrameKind stage,
                        const NoiseConfig& noise);

/// Lifts a 2D box to a BEV position: the ray through the box center is
/// followed out to the range of the track's predicted center.
Eigen::Vector2d lift_to_bev(const Box2D& box, const CameraModel& cam, const Box3D& predicted);

double fuse_scores(double s3d, double s2d, double alpha);
/// Noisy-OR: 1 - (1 - prior)(1 - fused).
double update_score_sync(double prior, double s_fused);
/// Noisy-OR with the observation attenuated by beta.
double update_score_async(double prior, double s_single, double beta);

/// Combines prior and effective observation score under a strategy.
/// Noisy-OR, average, EMA (weight on the prior) and max. Average is the
/// running mean over `count` scores, this observation included.
double combine_score(ScoreStrategy strategy, double prior, double observed, double ema_weight,
                     int count = 2);

enum class MatchOutcome { matched_sync, matched_async, unmatched };

/// Applies the score update for the outcome, records the posterior in the
/// history and terminates the track when its average drops below the
/// deletion threshold (score mode) or it misses too many frames (count mode).
/// `observed` is the fused score (sync) or the single-modality score (async).
Track lifecycle_step(const Track& track, MatchOutcome outcome, double observed,
                     const ScoreConfig& cfg, const LifecycleConfig& lifecycle);

/// New track from a detection box. Velocity starts at zero.
Track spawn(std::uint64_t id, const Detection3D& det, double initial_score, double timestamp,
            const NoiseConfig& noise);
/// Initial score: fused for mix pairs, 3D score for pure 3D detections.
Track spawn(std::uint64_t id, const MixDetection& det, double alpha, double timestamp,
            const NoiseConfig& noise);
Track spawn(std::uint64_t id, const Detection3D& det, double timestamp, const NoiseConfig& noise);

/// Minimum-variance fusion weight var2d / (var3d + var2d).
double optimal_alpha(double var3d, double var2d);
/// alpha^2 var3d + (1 - alpha)^2 var2d.
double fused_variance(double alpha, double var3d, double var2d);
/// Variance of the Noisy-OR posterior due to input noise: (1 - prior)^2 var.
double updated_score_variance(double prior, double input_variance);

}  // namespace asyncmot
