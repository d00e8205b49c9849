#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "asyncmot/config.hpp"
#include "asyncmot/estimation.hpp"
#include "asyncmot/preprocess.hpp"

namespace asyncmot {

/// Indices into the track list and the detection lists of a PreprocessOutput.
struct AssociationResult {
  using Pairs = std::vector<std::pair<std::size_t, std::size_t>>;

  Pairs mix_pairs;     // (track, mix)          phase 1
  Pairs pure3d_pairs;  // (track, pure3d)       phase 2
  Pairs pure2d_pairs;  // (track, pure2d)       phase 3
  Pairs async_pairs;   // (track, single2d)     camera-only frames
  std::vector<std::size_t> unmatched_tracks;
  std::vector<std::size_t> unmatched_mix;
  std::vector<std::size_t> unmatched_pure3d;
  std::vector<std::size_t> unmatched_pure2d;
  std::vector<std::size_t> unmatched_single2d;
};

/// Three-phase cascade on a sync frame: mix detections (BEV GIoU), then pure
/// 3D detections (BEV GIoU), then pure 2D detections (image IoU of the
/// projected track in the detection's camera). Each phase sees only tracks
/// left unmatched by the previous one. Matching never crosses classes.
/// With `cfg.matching.cascade == false`, one BEV stage matches all 3D
/// detections with the phase-1 gate and 2D detections stay unused.
AssociationResult associate_sync(std::span<const Track> tracks, const PreprocessOutput& dets,
                                 std::span<const CameraModel> cams, const TrackerConfig& cfg);

/// Camera-only frame: every track against the 2D detections, as in phase 3.
AssociationResult associate_async(std::span<const Track> tracks,
                                  std::span<const Detection2D> dets2d,
                                  std::span<const CameraModel> cams, const TrackerConfig& cfg);

}  // namespace asyncmot
