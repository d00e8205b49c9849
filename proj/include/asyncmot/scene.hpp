#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "asyncmot/detection.hpp"

namespace asyncmot {

struct GtObject {
  std::uint64_t id = 0;
  std::string label;
  Box3D box;
  Eigen::Vector2d velocity = Eigen::Vector2d::Zero();

  bool operator==(const GtObject&) const = default;
};

struct GtFrame {
  double timestamp = 0.0;
  FrameKind kind = FrameKind::sync;
  std::vector<GtObject> objects;

  bool operator==(const GtFrame&) const = default;
};

struct GroundTruth {
  std::vector<GtFrame> frames;

  /// Frame with exactly this timestamp, or nullptr.
  const GtFrame* at(double timestamp) const;

  bool operator==(const GroundTruth&) const = default;
};

struct Scene {
  std::string id;
  std::vector<CameraModel> cameras;
  std::vector<Frame> frames;
  std::optional<GroundTruth> gt;

  /// Drops async frames (and their ground truth).
  Scene sync_only() const;
};

}  // namespace asyncmot
