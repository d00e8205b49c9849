#include <gtest/gtest.h>

#include <Eigen/LU>
#include <cmath>

#include "asyncmot/errors.hpp"
#include "asyncmot/metrics.hpp"
#include "asyncmot/sim.hpp"

using namespace asyncmot;

TEST(FrameSchedule, TwoSecondsAtTwoAndFourHertz) {
  ScenarioConfig cfg;
  cfg.duration = 2.0;
  const auto s = frame_schedule(cfg);
  ASSERT_EQ(s.size(), 8u);
  const double expect_t[] = {0.0, 0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 1.75};
  int n_sync = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    EXPECT_NEAR(s[i].first, expect_t[i], 1e-12);
    EXPECT_EQ(s[i].second, i % 2 == 0 ? FrameKind::sync : FrameKind::async);
    n_sync += s[i].second == FrameKind::sync;
  }
  EXPECT_EQ(n_sync, 4);
}

TEST(ScenarioConfig, Validation) {
  ScenarioConfig cfg;
  cfg.sync_rate = 0.0;
  EXPECT_THROW(cfg.validate(), ValidationError);
  cfg = ScenarioConfig{};
  cfg.async_rate = 1.0;
  EXPECT_THROW(cfg.validate(), ValidationError);
  cfg = ScenarioConfig{};
  cfg.lidar_dropout = 1.5;
  EXPECT_THROW(cfg.validate(), ValidationError);
}

TEST(ObjectState, MotionPatterns) {
  ObjectSpec cv;
  cv.speed = 2.0;
  cv.yaw = M_PI / 2;
  const auto s = object_state(cv, 1, 3.0);
  ASSERT_TRUE(s);
  EXPECT_NEAR(s->box.x, 10.0, 1e-9);
  EXPECT_NEAR(s->box.y, 6.0, 1e-9);
  EXPECT_NEAR(s->box.z, cv.h / 2, 1e-12);

  ObjectSpec turn = cv;
  turn.motion = MotionPattern::turning;
  turn.turn_rate = 0.5;
  // Closed-form arc against small-step integration.
  double x = turn.x, y = turn.y, yaw = turn.yaw;
  const double dt = 1e-5;
  for (int i = 0; i < 200000; ++i) {
    x += turn.speed * std::cos(yaw + 0.5 * turn.turn_rate * dt) * dt;
    y += turn.speed * std::sin(yaw + 0.5 * turn.turn_rate * dt) * dt;
    yaw += turn.turn_rate * dt;
  }
  const auto st = object_state(turn, 1, 2.0);
  EXPECT_NEAR(st->box.x, x, 1e-6);
  EXPECT_NEAR(st->box.y, y, 1e-6);

  ObjectSpec sg = cv;
  sg.motion = MotionPattern::stop_and_go;
  sg.cycle = 4.0;
  const auto a = object_state(sg, 1, 2.0);
  const auto b = object_state(sg, 1, 3.5);
  EXPECT_NEAR(a->box.y, b->box.y, 1e-9);  // stopped during the second half
  EXPECT_GT(object_state(sg, 1, 5.0)->box.y, b->box.y);

  ObjectSpec late = cv;
  late.spawn_time = 1.0;
  late.despawn_time = 2.0;
  EXPECT_FALSE(object_state(late, 1, 0.5));
  EXPECT_TRUE(object_state(late, 1, 1.5));
  EXPECT_FALSE(object_state(late, 1, 2.0));
}

TEST(Generate, NoiselessDetectionsEqualTruth) {
  const Scene scene = generate(noiseless_scenario(1, 3, 4.0));
  ASSERT_TRUE(scene.gt);
  ASSERT_EQ(scene.frames.size(), scene.gt->frames.size());
  for (std::size_t i = 0; i < scene.frames.size(); ++i) {
    const auto& f = scene.frames[i];
    const auto& g = scene.gt->frames[i];
    EXPECT_EQ(f.timestamp, g.timestamp);
    if (f.kind == FrameKind::async) {
      EXPECT_TRUE(f.dets3d.empty());
      continue;
    }
    ASSERT_EQ(f.dets3d.size(), g.objects.size());
    for (std::size_t k = 0; k < g.objects.size(); ++k) {
      EXPECT_EQ(f.dets3d[k].box, g.objects[k].box);
      EXPECT_EQ(f.dets3d[k].label, g.objects[k].label);
    }
  }
}

TEST(Generate, FullLidarDropoutLeavesNo3d) {
  ScenarioConfig cfg = noiseless_scenario(2, 3, 3.0);
  cfg.lidar_dropout = 1.0;
  const Scene scene = generate(cfg);
  std::size_t n2d = 0;
  for (const auto& f : scene.frames) {
    EXPECT_TRUE(f.dets3d.empty());
    n2d += f.dets2d.size();
  }
  EXPECT_GT(n2d, 0u);
}

TEST(Generate, DeterministicPerSeed) {
  const Scene a = generate(designed_scenario(11, 0.1));
  const Scene b = generate(designed_scenario(11, 0.1));
  const Scene c = generate(designed_scenario(12, 0.1));
  EXPECT_EQ(a.frames, b.frames);
  EXPECT_EQ(a.gt, b.gt);
  EXPECT_NE(a.frames, c.frames);
}

TEST(Generate, FramesValidate) {
  const Scene scene = generate(designed_scenario(4, 0.2));
  for (const auto& f : scene.frames) EXPECT_NO_THROW(f.validate());
}

TEST(PerturbExtrinsics, ZeroSigmaIsIdentity) {
  const auto cams = default_camera_rig();
  EXPECT_EQ(perturb_extrinsics(cams, 0.0, 7), cams);
  EXPECT_THROW(perturb_extrinsics(cams, -0.1, 7), ValidationError);
}

TEST(PerturbExtrinsics, StaysOrthonormal) {
  const auto cams = perturb_extrinsics(default_camera_rig(), 0.3, 3);
  for (const auto& c : cams) {
    EXPECT_NEAR((c.rotation * c.rotation.transpose() - Eigen::Matrix3d::Identity()).norm(), 0.0,
                1e-9);
    EXPECT_NEAR(c.rotation.determinant(), 1.0, 1e-9);
    EXPECT_NO_THROW(c.validate());
  }
}

TEST(PerturbExtrinsics, TranslationOffsetsMatchSigma) {
  const auto cams = default_camera_rig();
  const double sigma = 0.2;
  double sum = 0.0, sq = 0.0;
  std::size_t n = 0;
  for (std::uint64_t seed = 0; seed < 2000; ++seed) {
    const auto p = perturb_extrinsics(cams, sigma, seed);
    for (std::size_t i = 0; i < cams.size(); ++i) {
      const Eigen::Vector3d d = p[i].translation - cams[i].translation;
      for (int k = 0; k < 3; ++k) {
        sum += d[k];
        sq += d[k] * d[k];
        ++n;
      }
    }
  }
  const double mean = sum / n;
  const double sd = std::sqrt(sq / n - mean * mean);
  EXPECT_NEAR(mean, 0.0, 4.0 * sigma / std::sqrt(static_cast<double>(n)));
  EXPECT_NEAR(sd, sigma, 0.02 * sigma);
}

TEST(Scene, SyncOnlyKeepsSyncFramesAndTruth) {
  const Scene scene = generate(noiseless_scenario(3, 2, 3.0));
  const Scene s = scene.sync_only();
  for (const auto& f : s.frames) EXPECT_EQ(f.kind, FrameKind::sync);
  for (const auto& f : s.gt->frames) EXPECT_EQ(f.kind, FrameKind::sync);
  EXPECT_EQ(s.frames.size(), 6u);
  EXPECT_EQ(s.gt->frames.size(), 6u);
  ASSERT_NE(scene.gt->at(0.5), nullptr);
  EXPECT_EQ(scene.gt->at(0.6), nullptr);
}
