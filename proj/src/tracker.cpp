#include "asyncmot/tracker.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "asyncmot/errors.hpp"

namespace asyncmot {

Tracker::Tracker(TrackerConfig config) : config_(std::move(config)) { config_.validate(); }

double Tracker::camera_agreement(int camera_id) const {
  const double prior = config_.calibration.prior_count;
  const auto it = support_.find(camera_id);
  const double viewed = it == support_.end() ? 0.0 : static_cast<double>(it->second.viewed);
  const double paired = it == support_.end() ? 0.0 : static_cast<double>(it->second.paired);
  return viewed + prior > 0.0 ? (paired + prior) / (viewed + prior) : 1.0;
}

bool Tracker::camera_trusted(int camera_id) const {
  return !config_.calibration.enabled ||
         camera_agreement(camera_id) >= config_.calibration.min_agreement;
}

TrackSnapshot Tracker::step(const Frame& frame) {
  if (last_timestamp_ && !(frame.timestamp > *last_timestamp_)) {
    std::ostringstream err;
    err << "frame at t=" << frame.timestamp << " does not follow t=" << *last_timestamp_;
    throw OrderingError(err.str());
  }
  frame.validate();
  last_timestamp_ = frame.timestamp;
  stats_ = {};

  if (config_.calibration.enabled) {
    const auto support = measure_camera_support(frame, config_.matching.mix_iou_gate,
                                                config_.calibration.min_score);
    for (const auto& [cam, s] : support) {
      support_[cam].viewed += s.viewed;
      support_[cam].paired += s.paired;
    }
  }
  std::set<int> distrusted;
  std::vector<CameraModel> trusted_cams;
  for (const auto& cam : frame.cameras) {
    if (camera_trusted(cam.id)) {
      trusted_cams.push_back(cam);
    } else {
      distrusted.insert(cam.id);
    }
  }

  for (auto& track : tracks_) {
    const double prior = track.score;
    track = predict(track, frame.timestamp - track.last_timestamp, frame.kind,
                    config_.params(track.label));
    // A camera-only frame says nothing about a track no trusted camera can see.
    if (frame.kind == FrameKind::async && !best_camera_match(track.box(), trusted_cams)) {
      track.score = prior;
    }
  }
  const PreprocessOutput dets = preprocess_frame(frame, config_, distrusted);
  const AssociationResult assoc =
      frame.kind == FrameKind::sync
          ? associate_sync(tracks_, dets, frame.cameras, config_)
          : associate_async(tracks_, dets.single2d, frame.cameras, config_);

  std::vector<MatchOutcome> outcome(tracks_.size(), MatchOutcome::unmatched);
  std::vector<double> observed(tracks_.size(), 0.0);

  for (const auto& [t, d] : assoc.mix_pairs) {
    const MixDetection& mix = dets.mix[d];
    const ClassParams& p = config_.params(tracks_[t].label);
    tracks_[t] = update_motion(tracks_[t], mix.det3d.box, FrameKind::sync, p.noise);
    outcome[t] = MatchOutcome::matched_sync;
    observed[t] = fuse_scores(mix.det3d.score, mix.det2d.score, p.score.alpha);
  }
  for (const auto& [t, d] : assoc.pure3d_pairs) {
    const Detection3D& det = dets.pure3d[d];
    const ClassParams& p = config_.params(tracks_[t].label);
    tracks_[t] = update_motion(tracks_[t], det.box, FrameKind::sync, p.noise);
    outcome[t] = MatchOutcome::matched_sync;
    observed[t] = det.score;
  }
  // Camera-only matches carry no depth: lift to BEV and trust them less.
  auto apply_camera_only = [&](const AssociationResult::Pairs& pairs,
                               const std::vector<Detection2D>& source) {
    for (const auto& [t, d] : pairs) {
      const Detection2D& det = source[d];
      const ClassParams& p = config_.params(tracks_[t].label);
      if (const CameraModel* cam = find_camera(frame.cameras, det.camera_id)) {
        const Eigen::Vector2d bev = lift_to_bev(det.box, *cam, tracks_[t].box());
        tracks_[t] = update_motion_bev(tracks_[t], bev, FrameKind::async, p.noise);
      }
      outcome[t] = MatchOutcome::matched_async;
      observed[t] = det.score;
    }
  };
  apply_camera_only(assoc.pure2d_pairs, dets.pure2d);
  apply_camera_only(assoc.async_pairs, dets.single2d);

  stats_.mix_matches = assoc.mix_pairs.size();
  stats_.pure3d_matches = assoc.pure3d_pairs.size();
  stats_.pure2d_matches = assoc.pure2d_pairs.size();
  stats_.async_matches = assoc.async_pairs.size();

  for (std::size_t t = 0; t < tracks_.size(); ++t) {
    const ClassParams& p = config_.params(tracks_[t].label);
    tracks_[t] = lifecycle_step(tracks_[t], outcome[t], observed[t], p.score, config_.lifecycle);
  }
  const auto alive_end = std::stable_partition(
      tracks_.begin(), tracks_.end(), [](const Track& t) { return t.status != TrackStatus::dead; });
  stats_.terminated = static_cast<std::size_t>(tracks_.end() - alive_end);
  tracks_.erase(alive_end, tracks_.end());

  if (frame.kind == FrameKind::sync) {
    for (std::size_t d : assoc.unmatched_mix) {
      const MixDetection& mix = dets.mix[d];
      const ClassParams& p = config_.params(mix.det3d.label);
      tracks_.push_back(spawn(next_id_++, mix, p.score.alpha, frame.timestamp, p.noise));
      ++stats_.spawned;
    }
    if (config_.matching.spawn_from_pure3d) {
      for (std::size_t d : assoc.unmatched_pure3d) {
        const Detection3D& det = dets.pure3d[d];
        tracks_.push_back(spawn(next_id_++, det, frame.timestamp, config_.params(det.label).noise));
        ++stats_.spawned;
      }
    }
  }

  TrackSnapshot snap;
  snap.timestamp = frame.timestamp;
  snap.kind = frame.kind;
  snap.tracks.reserve(tracks_.size());
  for (const auto& t : tracks_) {
    snap.tracks.push_back(TrackState{t.id, t.label, t.box(), t.velocity(), t.score, t.status});
  }
  return snap;
}

std::vector<TrackSnapshot> run_scene(std::span<const Frame> frames, const TrackerConfig& config) {
  Tracker tracker(config);
  std::vector<TrackSnapshot> out;
  for (const auto& frame : frames) {
    if (frame.kind == FrameKind::async && !config.use_async) continue;
    auto snap = tracker.step(frame);
    if (frame.kind == FrameKind::sync || config.emit_async_snapshots) out.push_back(std::move(snap));
  }
  return out;
}

}  // namespace asyncmot
