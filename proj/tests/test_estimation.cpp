#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

#include "asyncmot/errors.hpp"
#include "asyncmot/estimation.hpp"

using namespace asyncmot;

namespace {

Track moving_track(double vx, double vy) {
  Detection3D d{Box3D{0, 0, 0.8, 1.9, 4.5, 1.6, 0.0}, 0.8, "car", 0.0};
  Track t = spawn(1, d, 0.0, NoiseConfig{});
  t.state(7) = vx;
  t.state(8) = vy;
  return t;
}

double min_eigenvalue(const StateCovariance& p) {
  return Eigen::SelfAdjointEigenSolver<StateCovariance>(p, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
}

}  // namespace

TEST(Predict, LinearMotion) {
  const Track t = predict(moving_track(2, 0), 0.25, FrameKind::sync, ClassParams{});
  EXPECT_NEAR(t.state(0), 0.5, 1e-12);
  EXPECT_NEAR(t.state(1), 0.0, 1e-12);
  EXPECT_DOUBLE_EQ(t.last_timestamp, 0.25);
}

TEST(Predict, ScoreDecay) {
  Track t = moving_track(0, 0);
  t.score = 0.8;
  ClassParams p;
  p.score.decay_sync = 0.7;
  EXPECT_NEAR(predict(t, 0.5, FrameKind::sync, p).score, 0.56, 1e-12);
  p.score.decay_async = 0.9;
  EXPECT_NEAR(predict(t, 0.5, FrameKind::async, p).score, 0.72, 1e-12);
}

TEST(Predict, SplitStepsMatchOneStepForTheMean) {
  const Track t = moving_track(1.5, -0.7);
  const ClassParams p;
  const Track once = predict(t, 0.5, FrameKind::sync, p);
  const Track twice = predict(predict(t, 0.25, FrameKind::sync, p), 0.25, FrameKind::sync, p);
  EXPECT_NEAR((once.state - twice.state).norm(), 0.0, 1e-12);
  // The white-noise acceleration model composes exactly for the covariance too.
  EXPECT_NEAR((once.covariance - twice.covariance).norm(), 0.0, 1e-9);
}

TEST(Predict, CovarianceTraceGrows) {
  const Track t = moving_track(1, 1);
  EXPECT_GE(predict(t, 0.5, FrameKind::sync, ClassParams{}).covariance.trace(), t.covariance.trace());
}

TEST(Predict, RejectsNonPositiveDt) {
  EXPECT_THROW(predict(moving_track(0, 0), 0.0, FrameKind::sync, ClassParams{}), ValidationError);
  EXPECT_THROW(predict(moving_track(0, 0), -1.0, FrameKind::sync, ClassParams{}), ValidationError);
}

TEST(UpdateMotion, ZeroInnovationKeepsStateAndShrinksCovariance) {
  const Track t = predict(moving_track(1, 0), 0.5, FrameKind::sync, ClassParams{});
  const Track u = update_motion(t, t.box(), FrameKind::sync, NoiseConfig{});
  EXPECT_NEAR((u.state - t.state).norm(), 0.0, 1e-12);
  for (int i = 0; i < kBoxDim; ++i) EXPECT_LT(u.covariance(i, i), t.covariance(i, i));
}

TEST(UpdateMotion, AsyncMovesLessThanSync) {
  const Track t = predict(moving_track(0, 0), 0.5, FrameKind::sync, ClassParams{});
  Box3D obs = t.box();
  obs.x += 1.0;
  NoiseConfig n;
  n.gamma = 100.0;
  const double sync_shift = update_motion(t, obs, FrameKind::sync, n).state(0) - t.state(0);
  const double async_shift = update_motion(t, obs, FrameKind::async, n).state(0) - t.state(0);
  EXPECT_GT(sync_shift, 0.0);
  EXPECT_GT(async_shift, 0.0);
  EXPECT_LT(async_shift, sync_shift);
}

TEST(UpdateMotion, ScalarGainMatchesClosedForm) {
  // Only x observed and x decoupled from the rest at spawn: K = P / (P + gamma^n C).
  const Track t = moving_track(0, 0);
  NoiseConfig n;
  const double p = t.covariance(0, 0), c = n.measurement_var[0];
  const Eigen::Vector2d obs(1.0, 0.0);
  EXPECT_NEAR(update_motion_bev(t, obs, FrameKind::sync, n).state(0), p / (p + c), 1e-12);
  EXPECT_NEAR(update_motion_bev(t, obs, FrameKind::async, n).state(0), p / (p + n.gamma * c), 1e-12);
}

TEST(UpdateMotion, HugeGammaIgnoresObservation) {
  const Track t = moving_track(0, 0);
  NoiseConfig n;
  n.gamma = 1e15;
  Box3D obs = t.box();
  obs.x += 5.0;
  EXPECT_NEAR(update_motion(t, obs, FrameKind::async, n).state(0), 0.0, 1e-9);
}

TEST(UpdateMotion, HeadingFlipIsAbsorbed) {
  Track t = moving_track(0, 0);
  Box3D obs = t.box();
  obs.yaw = normalize_angle(t.state(6) + M_PI + 0.01);
  const Track u = update_motion(t, obs, FrameKind::sync, NoiseConfig{});
  EXPECT_LT(std::abs(normalize_angle(u.state(6) - t.state(6))), 0.02);
}

TEST(UpdateMotion, CovarianceStaysPsd) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-1, 1);
  Track t = moving_track(1, 0);
  const ClassParams p;
  for (int i = 0; i < 2000; ++i) {
    t = predict(t, 0.05 + 0.5 * std::abs(u(rng)), u(rng) > 0 ? FrameKind::sync : FrameKind::async, p);
    if (u(rng) > 0) {
      Box3D obs = t.box();
      obs.x += u(rng);
      obs.y += u(rng);
      obs.yaw += u(rng);
      t = update_motion(t, obs, u(rng) > 0 ? FrameKind::sync : FrameKind::async, p.noise);
    } else {
      t = update_motion_bev(t, Eigen::Vector2d(t.state(0) + u(rng), t.state(1)), FrameKind::async, p.noise);
    }
    EXPECT_GE(min_eigenvalue(t.covariance), -1e-9);
    EXPECT_LT((t.covariance - t.covariance.transpose()).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(LiftToBev, PreservesRangeAlongRay) {
  const auto cam = CameraModel::looking_at_heading(0, Eigen::Vector3d(0, 0, 1.6), 0.0, 1266, 1600, 900);
  const Box3D predicted{20, 1, 0.8, 1.9, 4.5, 1.6, 0};
  const Box3D actual{20, 3, 0.8, 1.9, 4.5, 1.6, 0};
  const Box2D b = *project_box(actual, cam);
  const Eigen::Vector2d xy = lift_to_bev(b, cam, predicted);
  // Lateral position follows the box; range equals the prediction's.
  EXPECT_NEAR(std::atan2(xy.y(), xy.x()), std::atan2(3.0, 20.0), 0.02);
  const Eigen::Vector3d c = cam.center();
  const double r_pred = (Eigen::Vector3d(20, 1, 0.8) - c).norm();
  const Eigen::Vector3d ray = cam.pixel_ray(b.center().x(), b.center().y());
  EXPECT_NEAR((c + r_pred * ray).head<2>().norm(), xy.norm(), 1e-9);
}

TEST(Scores, FusionExamples) {
  EXPECT_NEAR(fuse_scores(0.8, 0.6, 0.5), 0.7, 1e-12);
  EXPECT_DOUBLE_EQ(fuse_scores(0.8, 0.6, 1.0), 0.8);
  EXPECT_NEAR(fuse_scores(1.0, 0.5, 0.4), 0.7, 1e-12);
}

TEST(Scores, SyncUpdateExamples) {
  EXPECT_DOUBLE_EQ(update_score_sync(0.5, 0.5), 0.75);
  EXPECT_DOUBLE_EQ(update_score_sync(0.3, 0.0), 0.3);
  EXPECT_DOUBLE_EQ(update_score_sync(0.0, 0.4), 0.4);
  EXPECT_NEAR(update_score_sync(0.56, 0.7), 0.868, 1e-12);
}

TEST(Scores, AsyncUpdateExamples) {
  EXPECT_DOUBLE_EQ(update_score_async(0.4, 0.9, 0.0), 0.4);
  EXPECT_DOUBLE_EQ(update_score_async(0.5, 1.0, 0.5), 0.75);
  EXPECT_NEAR(update_score_async(0.0, 0.6, 0.5), 0.3, 1e-12);
}

TEST(Scores, StrategiesBehindOneInterface) {
  EXPECT_DOUBLE_EQ(combine_score(ScoreStrategy::noisy_or, 0.5, 0.5, 0.5), 0.75);
  EXPECT_DOUBLE_EQ(combine_score(ScoreStrategy::average, 0.2, 0.6, 0.5), 0.4);
  EXPECT_NEAR(combine_score(ScoreStrategy::average, 0.2, 0.6, 0.5, 4), 0.3, 1e-12);
  EXPECT_NEAR(combine_score(ScoreStrategy::ema, 0.2, 0.6, 0.75), 0.3, 1e-12);
  EXPECT_DOUBLE_EQ(combine_score(ScoreStrategy::max, 0.2, 0.6, 0.5), 0.6);
}

TEST(Lifecycle, DiesBelowThreshold) {
  Track t = moving_track(0, 0);
  t.score_history = {0.09};
  t.score = 0.09;
  ScoreConfig cfg;
  cfg.delete_threshold = 0.1;
  cfg.average_window = 1;
  const Track out = lifecycle_step(t, MatchOutcome::unmatched, 0.0, cfg, LifecycleConfig{});
  EXPECT_EQ(out.status, TrackStatus::dead);
}

TEST(Lifecycle, MatchedEverySyncFrameNeverDies) {
  Track t = moving_track(0, 0);
  t.score = 0.6;
  t.score_history = {0.6};
  ClassParams p;
  for (int i = 0; i < 100; ++i) {
    t = predict(t, 0.5, FrameKind::sync, p);
    const double prior = t.score;
    t = lifecycle_step(t, MatchOutcome::matched_sync, 0.6, p.score, LifecycleConfig{});
    EXPECT_GE(t.score, prior);
    EXPECT_NE(t.status, TrackStatus::dead);
  }
}

TEST(Lifecycle, GeometricDecayDeathFrame) {
  // Posterior after k misses is 0.8 * 0.7^k; the full-lifetime average after
  // k misses is 0.8 (1 - 0.7^(k+1)) / (0.3 (k+1)).
  int expected = -1;
  for (int k = 1; k < 200 && expected < 0; ++k) {
    const double avg = 0.8 * (1.0 - std::pow(0.7, k + 1)) / (0.3 * (k + 1));
    if (avg < 0.1) expected = k;
  }
  ASSERT_GT(expected, 0);

  Detection3D d{Box3D{0, 0, 0.8, 1.9, 4.5, 1.6, 0.0}, 0.8, "car", 0.0};
  Track t = spawn(1, d, 0.0, NoiseConfig{});
  ClassParams p;
  p.score.decay_sync = 0.7;
  p.score.delete_threshold = 0.1;
  int died_at = -1;
  for (int k = 1; k < 200; ++k) {
    t = predict(t, 0.5, FrameKind::sync, p);
    t = lifecycle_step(t, MatchOutcome::unmatched, 0.0, p.score, LifecycleConfig{});
    if (t.status == TrackStatus::dead) {
      died_at = k;
      break;
    }
  }
  EXPECT_EQ(died_at, expected);
}

TEST(Lifecycle, AsyncMatchUsesAttenuatedScore) {
  Track t = moving_track(0, 0);
  t.score = 0.5;
  ScoreConfig cfg;
  cfg.beta = 0.5;
  const Track out = lifecycle_step(t, MatchOutcome::matched_async, 1.0, cfg, LifecycleConfig{});
  EXPECT_DOUBLE_EQ(out.score, 0.75);
}

TEST(Lifecycle, CountModeKillsAfterMisses) {
  Track t = moving_track(0, 0);
  LifecycleConfig lc;
  lc.mode = LifecycleMode::count;
  lc.max_misses = 2;
  ScoreConfig cfg;
  t = lifecycle_step(t, MatchOutcome::unmatched, 0.0, cfg, lc);
  t = lifecycle_step(t, MatchOutcome::unmatched, 0.0, cfg, lc);
  EXPECT_NE(t.status, TrackStatus::dead);
  t = lifecycle_step(t, MatchOutcome::unmatched, 0.0, cfg, lc);
  EXPECT_EQ(t.status, TrackStatus::dead);
}

TEST(Lifecycle, DeadStaysDead) {
  Track t = moving_track(0, 0);
  t.status = TrackStatus::dead;
  t = lifecycle_step(t, MatchOutcome::matched_sync, 1.0, ScoreConfig{}, LifecycleConfig{});
  EXPECT_EQ(t.status, TrackStatus::dead);
}

TEST(Spawn, InitialScores) {
  MixDetection m;
  m.det3d = Detection3D{Box3D{}, 0.9, "car", 0.0};
  m.det2d = Detection2D{Box2D{0, 0, 1, 1}, 0.7, "car", 0, 0.0};
  EXPECT_NEAR(spawn(1, m, 0.5, 0.0, NoiseConfig{}).score, 0.8, 1e-12);
  const Detection3D d{Box3D{}, 0.6, "car", 0.0};
  const Track t = spawn(2, d, 1.5, NoiseConfig{});
  EXPECT_DOUBLE_EQ(t.score, 0.6);
  EXPECT_DOUBLE_EQ(t.last_timestamp, 1.5);
  EXPECT_EQ(t.velocity(), Eigen::Vector2d::Zero());
}

TEST(Calibration, OptimalAlphaExamples) {
  EXPECT_DOUBLE_EQ(optimal_alpha(1, 1), 0.5);
  EXPECT_DOUBLE_EQ(fused_variance(0.5, 1, 1), 0.5);
  EXPECT_DOUBLE_EQ(optimal_alpha(1, 3), 0.75);
  EXPECT_DOUBLE_EQ(fused_variance(0.75, 1, 3), 0.75);
  EXPECT_NEAR(optimal_alpha(1, 1e12), 1.0, 1e-9);
  EXPECT_DOUBLE_EQ(optimal_alpha(1, std::numeric_limits<double>::infinity()), 1.0);
  EXPECT_THROW(optimal_alpha(0, 1), ValidationError);
  EXPECT_THROW(optimal_alpha(1, -1), ValidationError);
}

TEST(Calibration, FusedVarianceExamples) {
  EXPECT_DOUBLE_EQ(fused_variance(0.0, 1, 3), 3.0);
  EXPECT_DOUBLE_EQ(fused_variance(1.0, 1, 3), 1.0);
  EXPECT_DOUBLE_EQ(fused_variance(0.75, 1, 3), 0.5625 + 0.1875);
  EXPECT_DOUBLE_EQ(updated_score_variance(0.5, 0.04), 0.01);
}
