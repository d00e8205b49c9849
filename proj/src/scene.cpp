#include "asyncmot/scene.hpp"

namespace asyncmot {

const GtFrame* GroundTruth::at(double timestamp) const {
  for (const auto& f : frames) {
    if (f.timestamp == timestamp) return &f;
  }
  return nullptr;
}

Scene Scene::sync_only() const {
  Scene out;
  out.id = id;
  out.cameras = cameras;
  for (const auto& f : frames) {
    if (f.kind == FrameKind::sync) out.frames.push_back(f);
  }
  if (gt) {
    GroundTruth g;
    for (const auto& f : gt->frames) {
      if (f.kind == FrameKind::sync) g.frames.push_back(f);
    }
    out.gt = std::move(g);
  }
  return out;
}

}  // namespace asyncmot
