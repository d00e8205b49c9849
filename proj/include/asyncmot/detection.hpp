#pragma once

#include <string>
#include <vector>

#include "asyncmot/geometry.hpp"

namespace asyncmot {

/// Sync frames carry LiDAR and camera detections; async frames are camera-only.
enum class FrameKind { sync, async };

const char* to_string(FrameKind kind);

struct Detection3D {
  Box3D box;
  double score = 0.0;
  std::string label;
  double timestamp = 0.0;

  bool operator==(const Detection3D&) const = default;
};

struct Detection2D {
  Box2D box;
  double score = 0.0;
  std::string label;
  int camera_id = 0;
  double timestamp = 0.0;

  bool operator==(const Detection2D&) const = default;
};

/// A 3D detection paired with the 2D detection of the same object.
struct MixDetection {
  Detection3D det3d;
  Detection2D det2d;
  int camera_id = 0;
  double match_iou = 0.0;
};

struct Frame {
  double timestamp = 0.0;
  FrameKind kind = FrameKind::sync;
  std::vector<Detection3D> dets3d;
  std::vector<Detection2D> dets2d;
  std::vector<CameraModel> cameras;

  /// Throws ValidationError on a violated invariant (scores outside [0, 1],
  /// non-positive box sizes, 3D detections on an async frame, unknown camera).
  void validate() const;

  bool operator==(const Frame&) const = default;
};

}  // namespace asyncmot
