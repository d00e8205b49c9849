#pragma once

#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "asyncmot/config.hpp"
#include "asyncmot/detection.hpp"

namespace asyncmot {

/// Per-class scalar with a fallback for classes that are not listed.
struct ClassThresholds {
  double fallback = 0.0;
  std::map<std::string, double> per_class;

  double at(const std::string& label) const {
    const auto it = per_class.find(label);
    return it == per_class.end() ? fallback : it->second;
  }
};

struct MatchOutput {
  std::vector<MixDetection> mix;
  std::vector<Detection3D> pure3d;
  std::vector<Detection2D> pure2d;
};

/// Confident 3D detections whose best view is one camera, and how many of
/// them paired with a 2D detection there.
struct CameraSupport {
  std::size_t viewed = 0;
  std::size_t paired = 0;
};

/// Detections sorted by modality for one frame. Sync frames fill mix/pure3d/
/// pure2d; async frames fill single2d only.
struct PreprocessOutput {
  FrameKind kind = FrameKind::sync;
  std::vector<MixDetection> mix;
  std::vector<Detection3D> pure3d;
  std::vector<Detection2D> pure2d;
  std::vector<Detection2D> single2d;
};

/// Keeps detections with score >= the threshold of their class.
std::vector<Detection3D> score_filter(std::span<const Detection3D> dets,
                                      const ClassThresholds& thresholds);

/// Greedy score-descending suppression within each class on BEV IoU. Survivors
/// keep their input order.
std::vector<Detection3D> nms_3d(std::span<const Detection3D> dets, double iou_thresh);
std::vector<Detection3D> nms_3d(std::span<const Detection3D> dets,
                                const ClassThresholds& iou_thresh);

/// Pairs 3D detections with same-class 2D detections. Each 3D detection is
/// projected into the camera where it appears largest; within each camera and
/// class, pairs are assigned on 1 - IoU and kept when IoU > `iou_gate`.
MatchOutput match_3d_2d(std::span<const Detection3D> d3, std::span<const Detection2D> d2,
                        std::span<const CameraModel> cams, double iou_gate);

/// Alignment objective for a box against a 2D target: 1 - IoU, 1 - GIoU, or
/// the corner distance normalized by the target diagonal.
double alignment_loss(const Box3D& box, const Box2D& target, const CameraModel& cam,
                      AlignmentMetric metric);

struct AlignResult {
  Detection3D det;
  double initial_loss = 0.0;
  double final_loss = 0.0;
  int iterations = 0;
  bool improved = false;
};

/// Refines the 3D member of a mix pair over all seven box parameters so that
/// its projection agrees with the 2D member. The loss never increases: when
/// the optimizer fails to improve, the input box is returned unchanged.
AlignResult align_to_camera(const MixDetection& mix, const CameraModel& cam, const AlignConfig& cfg,
                       double dim_min = 0.1, double dim_max = 20.0);

/// Per-camera support of one frame, keyed by camera id; empty for async
/// frames. Counts 3D detections scoring at least `min_score`.
std::map<int, CameraSupport> measure_camera_support(const Frame& frame, double mix_iou_gate,
                                                    double min_score);

/// Full per-frame preprocessing: matching, alignment of mix pairs, and score
/// filter plus NMS on the pure 3D set (sync); passthrough of 2D (async).
/// 2D detections from `distrusted` cameras are dropped before pairing.
PreprocessOutput preprocess_frame(const Frame& frame, const TrackerConfig& cfg,
                                  const std::set<int>& distrusted = {});

}  // namespace asyncmot
