#include "asyncmot/detection.hpp"

#include <cmath>
#include <sstream>

#include "asyncmot/errors.hpp"

namespace asyncmot {

const char* to_string(FrameKind kind) {
  return kind == FrameKind::sync ? "sync" : "async";
}

namespace {

void check_score(double score, const char* what, std::size_t index, double t) {
  if (!(score >= 0.0 && score <= 1.0)) {
    std::ostringstream err;
    err << "frame t=" << t << ": " << what << "[" << index << "].score = " << score
        << " is outside [0, 1]";
    throw ValidationError(err.str());
  }
}

}  // namespace

void Frame::validate() const {
  if (!std::isfinite(timestamp)) throw ValidationError("frame timestamp is not finite");
  if (kind == FrameKind::async && !dets3d.empty()) {
    std::ostringstream err;
    err << "frame t=" << timestamp << ": async frame carries " << dets3d.size()
        << " 3D detections";
    throw ValidationError(err.str());
  }
  for (const auto& cam : cameras) cam.validate();
  for (std::size_t i = 0; i < dets3d.size(); ++i) {
    check_score(dets3d[i].score, "dets3d", i, timestamp);
    if (!dets3d[i].box.valid()) {
      std::ostringstream err;
      err << "frame t=" << timestamp << ": dets3d[" << i << "] has a degenerate box";
      throw ValidationError(err.str());
    }
  }
  for (std::size_t i = 0; i < dets2d.size(); ++i) {
    check_score(dets2d[i].score, "dets2d", i, timestamp);
    if (!dets2d[i].box.valid()) {
      std::ostringstream err;
      err << "frame t=" << timestamp << ": dets2d[" << i << "] has x2 < x1 or y2 < y1";
      throw ValidationError(err.str());
    }
    if (find_camera(cameras, dets2d[i].camera_id) == nullptr) {
      std::ostringstream err;
      err << "frame t=" << timestamp << ": dets2d[" << i << "] references unknown camera "
          << dets2d[i].camera_id;
      throw ValidationError(err.str());
    }
  }
}

}  // namespace asyncmot
