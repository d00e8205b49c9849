#include <gtest/gtest.h>

#include <set>

#include "asyncmot/errors.hpp"
#include "asyncmot/metrics.hpp"
#include "asyncmot/sim.hpp"
#include "asyncmot/tracker.hpp"

using namespace asyncmot;

namespace {

Frame sync_frame(double t, const std::vector<CameraModel>& cams) {
  Frame f;
  f.timestamp = t;
  f.kind = FrameKind::sync;
  f.cameras = cams;
  return f;
}

}  // namespace

TEST(Tracker, EmptyFrameOnEmptyState) {
  Tracker tracker{TrackerConfig{}};
  const auto snap = tracker.step(sync_frame(0.0, default_camera_rig()));
  EXPECT_TRUE(snap.tracks.empty());
  EXPECT_DOUBLE_EQ(snap.timestamp, 0.0);
}

TEST(Tracker, MixDetectionSpawnsWithFusedScore) {
  const auto cams = default_camera_rig();
  Frame f = sync_frame(0.0, cams);
  const Box3D box{15, 0, 0.8, 1.9, 4.5, 1.6, 0};
  const auto p = best_camera_match(box, cams);
  f.dets3d = {Detection3D{box, 0.9, "car", 0.0}};
  f.dets2d = {Detection2D{p->box, 0.7, "car", p->camera_id, 0.0}};
  TrackerConfig cfg;
  Tracker tracker{cfg};
  const auto snap = tracker.step(f);
  ASSERT_EQ(snap.tracks.size(), 1u);
  EXPECT_NEAR(snap.tracks[0].score, fuse_scores(0.9, 0.7, cfg.defaults.score.alpha), 1e-12);
  EXPECT_EQ(tracker.last_stats().spawned, 1u);
}

TEST(Tracker, PureTwoDimensionalNeverSpawns) {
  const auto cams = default_camera_rig();
  Frame f = sync_frame(0.0, cams);
  f.dets2d = {Detection2D{Box2D{700, 400, 900, 500}, 0.9, "car", 0, 0.0}};
  Tracker tracker{TrackerConfig{}};
  EXPECT_TRUE(tracker.step(f).tracks.empty());
}

TEST(Tracker, RejectsOutOfOrderFrames) {
  const auto cams = default_camera_rig();
  Tracker tracker{TrackerConfig{}};
  tracker.step(sync_frame(1.0, cams));
  EXPECT_THROW(tracker.step(sync_frame(1.0, cams)), OrderingError);
  EXPECT_THROW(tracker.step(sync_frame(0.5, cams)), OrderingError);
}

TEST(Tracker, RejectsInvalidFrames) {
  const auto cams = default_camera_rig();
  Frame f = sync_frame(0.0, cams);
  f.kind = FrameKind::async;
  f.dets3d = {Detection3D{Box3D{15, 0, 0.8, 1.9, 4.5, 1.6, 0}, 0.9, "car", 0.0}};
  Tracker tracker{TrackerConfig{}};
  EXPECT_THROW(tracker.step(f), ValidationError);
}

TEST(RunScene, ZeroFrames) {
  EXPECT_TRUE(run_scene(std::vector<Frame>{}, TrackerConfig{}).empty());
}

TEST(RunScene, DeterministicReplay) {
  const Scene scene = generate(designed_scenario(5));
  const auto a = run_scene(scene.frames, TrackerConfig{});
  const auto b = run_scene(scene.frames, TrackerConfig{});
  EXPECT_EQ(a, b);
}

TEST(RunScene, SnapshotInvariants) {
  const Scene scene = generate(designed_scenario(6));
  TrackerConfig cfg;
  cfg.emit_async_snapshots = true;
  const auto snaps = run_scene(scene.frames, cfg);
  ASSERT_EQ(snaps.size(), scene.frames.size());
  std::set<std::uint64_t> dead;
  std::set<std::uint64_t> previous;
  for (std::size_t i = 0; i < snaps.size(); ++i) {
    EXPECT_EQ(snaps[i].timestamp, scene.frames[i].timestamp);
    std::set<std::uint64_t> ids;
    for (const auto& t : snaps[i].tracks) {
      EXPECT_NE(t.status, TrackStatus::dead);
      EXPECT_TRUE(ids.insert(t.id).second);
      EXPECT_FALSE(dead.count(t.id)) << "identity " << t.id << " came back";
      EXPECT_GE(t.score, 0.0);
      EXPECT_LE(t.score, 1.0);
    }
    for (auto id : previous) {
      if (!ids.count(id)) dead.insert(id);
    }
    previous = ids;
  }
}

TEST(RunScene, SyncOnlyDropsAsyncFrames) {
  const Scene scene = generate(designed_scenario(7));
  TrackerConfig cfg;
  cfg.use_async = false;
  cfg.emit_async_snapshots = true;
  const auto snaps = run_scene(scene.frames, cfg);
  for (const auto& s : snaps) EXPECT_EQ(s.kind, FrameKind::sync);
  const auto direct = run_scene(scene.sync_only().frames, cfg);
  EXPECT_EQ(snaps, direct);
}

TEST(RunScene, AsyncMatchBridgesKeyframeDropout) {
  // One object, constant velocity, LiDAR missing at one keyframe.
  ScenarioConfig sc;
  sc.duration = 6.0;
  ObjectSpec o;
  o.x = 15;
  o.y = 4;
  o.yaw = 0.3;
  o.speed = 3.0;
  sc.objects = {o};
  sc.scores = ScoreModel{0.9, 0.9, 0.9, 0.0};
  Scene scene = generate(sc);
  for (auto& f : scene.frames) {
    if (f.kind == FrameKind::sync && f.timestamp >= 2.9 && f.timestamp <= 4.1) {
      f.dets3d.clear();
      f.dets2d.clear();
    }
  }
  TrackerConfig full;
  TrackerConfig sync_only;
  sync_only.use_async = false;
  const auto rf = evaluate(run_scene(scene.frames, full), *scene.gt);
  const auto rs = evaluate(run_scene(scene.frames, sync_only), *scene.gt);
  EXPECT_EQ(rf.ids, 0u);
  EXPECT_LE(rf.ids, rs.ids);
  EXPECT_LE(rf.fn, rs.fn);
}

TEST(CameraCheck, AgreementCollapsesWithoutPartners) {
  const auto cams = default_camera_rig();
  const Box3D box{15, 0, 0.8, 1.9, 4.5, 1.6, 0};
  const int cam = best_camera_match(box, cams)->camera_id;
  TrackerConfig cfg;
  Tracker tracker{cfg};
  EXPECT_DOUBLE_EQ(tracker.camera_agreement(cam), 1.0);
  // One confident 3D detection per frame and never a 2D partner.
  for (int n = 1; n <= 5; ++n) {
    Frame f = sync_frame(0.5 * n, cams);
    f.dets3d = {Detection3D{box, 0.9, "car", f.timestamp}};
    tracker.step(f);
    const double prior = cfg.calibration.prior_count;
    EXPECT_NEAR(tracker.camera_agreement(cam), prior / (prior + n), 1e-12);
  }
  EXPECT_FALSE(tracker.camera_trusted(cam));
  EXPECT_TRUE(tracker.camera_trusted(cam == 0 ? 1 : 0));

  cfg.calibration.enabled = false;
  Tracker off{cfg};
  for (int n = 1; n <= 5; ++n) {
    Frame f = sync_frame(0.5 * n, cams);
    f.dets3d = {Detection3D{box, 0.9, "car", f.timestamp}};
    off.step(f);
  }
  EXPECT_TRUE(off.camera_trusted(cam));
}

TEST(CameraCheck, DistrustedCameraIsIgnoredAtAsyncFrames) {
  const auto cams = default_camera_rig();
  const Box3D box{15, 0, 0.8, 1.9, 4.5, 1.6, 0};
  const auto proj = best_camera_match(box, cams);
  Tracker tracker{TrackerConfig{}};
  for (int n = 1; n <= 6; ++n) {
    Frame f = sync_frame(0.5 * n, cams);
    f.dets3d = {Detection3D{box, 0.9, "car", f.timestamp}};
    tracker.step(f);
  }
  ASSERT_FALSE(tracker.camera_trusted(proj->camera_id));
  ASSERT_EQ(tracker.tracks().size(), 1u);

  std::vector<CameraModel> others;
  for (const auto& c : cams) {
    if (c.id != proj->camera_id) others.push_back(c);
  }
  const double before = tracker.tracks()[0].score;
  Frame a;
  a.timestamp = 3.25;
  a.kind = FrameKind::async;
  a.cameras = cams;
  a.dets2d = {Detection2D{proj->box, 0.9, "car", proj->camera_id, a.timestamp}};
  tracker.step(a);
  EXPECT_EQ(tracker.last_stats().async_matches, 0u);
  ASSERT_EQ(tracker.tracks().size(), 1u);
  if (!best_camera_match(tracker.tracks()[0].box(), others)) {
    EXPECT_DOUBLE_EQ(tracker.tracks()[0].score, before);
  }
}

TEST(CameraCheck, SimulatedMiscalibrationIsDetected) {
  std::size_t distrusted_clean = 0, distrusted_noisy = 0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    for (double sigma : {0.0, 0.3}) {
      const Scene scene = generate(designed_scenario(seed, sigma));
      Tracker tracker{TrackerConfig{}};
      for (const auto& f : scene.frames) tracker.step(f);
      for (const auto& c : scene.frames.front().cameras) {
        if (tracker.camera_trusted(c.id)) continue;
        (sigma == 0.0 ? distrusted_clean : distrusted_noisy) += 1;
      }
    }
  }
  EXPECT_EQ(distrusted_clean, 0u);
  EXPECT_GT(distrusted_noisy, 10u);
}
