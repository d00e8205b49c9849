#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "asyncmot/config.hpp"
#include "asyncmot/detection.hpp"
#include "asyncmot/estimation.hpp"
#include "asyncmot/matching.hpp"
#include "asyncmot/preprocess.hpp"

namespace asyncmot {

struct TrackState {
  std::uint64_t id = 0;
  std::string label;
  Box3D box;
  Eigen::Vector2d velocity = Eigen::Vector2d::Zero();
  double score = 0.0;
  TrackStatus status = TrackStatus::active;

  bool operator==(const TrackState&) const = default;
};

/// Live tracks after one frame, sorted by identity.
struct TrackSnapshot {
  double timestamp = 0.0;
  FrameKind kind = FrameKind::sync;
  std::vector<TrackState> tracks;

  bool operator==(const TrackSnapshot&) const = default;
};

/// Per-frame counters for diagnostics and tests.
struct StepStats {
  std::size_t mix_matches = 0;
  std::size_t pure3d_matches = 0;
  std::size_t pure2d_matches = 0;
  std::size_t async_matches = 0;
  std::size_t spawned = 0;
  std::size_t terminated = 0;
};

/// Stateful tracker for one scene. Frames must arrive in strictly increasing
/// timestamp order.
class Tracker {
 public:
  explicit Tracker(TrackerConfig config);

  /// Runs predict, preprocess, association, update, lifecycle and spawn for
  /// one frame. Throws OrderingError for a non-increasing timestamp.
  TrackSnapshot step(const Frame& frame);

  const std::vector<Track>& tracks() const { return tracks_; }
  const TrackerConfig& config() const { return config_; }
  const StepStats& last_stats() const { return stats_; }
  std::optional<double> last_timestamp() const { return last_timestamp_; }
  /// Smoothed pairing rate of a camera over the frames seen so far, the
  /// current one included.
  double camera_agreement(int camera_id) const;
  bool camera_trusted(int camera_id) const;

 private:
  TrackerConfig config_;
  std::vector<Track> tracks_;
  std::uint64_t next_id_ = 1;
  std::optional<double> last_timestamp_;
  StepStats stats_;
  std::map<int, CameraSupport> support_;
};

/// Folds `step` over ordered frames. Async frames are skipped when
/// `config.use_async` is false; snapshots at async frames are returned only
/// with `config.emit_async_snapshots`.
std::vector<TrackSnapshot> run_scene(std::span<const Frame> frames, const TrackerConfig& config);

}  // namespace asyncmot
