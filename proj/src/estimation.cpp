#include "asyncmot/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "asyncmot/errors.hpp"

namespace asyncmot {

const char* to_string(TrackStatus s) {
  switch (s) {
    case TrackStatus::tentative: return "tentative";
    case TrackStatus::active: return "active";
    case TrackStatus::dead: return "dead";
  }
  return "?";
}

TrackStatus parse_track_status(const std::string& name) {
  if (name == "tentative") return TrackStatus::tentative;
  if (name == "active") return TrackStatus::active;
  if (name == "dead") return TrackStatus::dead;
  throw ValidationError("unknown track status '" + name + "'");
}

Box3D Track::box() const {
  return Box3D{state(0), state(1), state(2), state(3), state(4), state(5), state(6)};
}

double Track::average_score(int window) const {
  if (score_history.empty()) return score;
  const std::size_t n = window > 0 ? std::min<std::size_t>(score_history.size(), window)
                                   : score_history.size();
  const double sum = std::accumulate(score_history.end() - static_cast<std::ptrdiff_t>(n),
                                     score_history.end(), 0.0);
  return sum / static_cast<double>(n);
}

namespace {

void check_covariance(const StateCovariance& p) {
  if (!p.allFinite()) throw NumericalError("track covariance has non-finite entries");
  if ((p - p.transpose()).cwiseAbs().maxCoeff() > 1e-9 * std::max(1.0, p.cwiseAbs().maxCoeff())) {
    throw NumericalError("track covariance is not symmetric");
  }
  const Eigen::SelfAdjointEigenSolver<StateCovariance> eig(p, Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() < -1e-9) {
    std::ostringstream err;
    err << "track covariance is not positive semidefinite (min eigenvalue "
        << eig.eigenvalues().minCoeff() << ")";
    throw NumericalError(err.str());
  }
}

template <int M>
Track kalman_update(const Track& track, const Eigen::Matrix<double, M, kStateDim>& h,
                    const Eigen::Matrix<double, M, 1>& innovation,
                    const Eigen::Matrix<double, M, M>& r) {
  check_covariance(track.covariance);
  const StateCovariance& p = track.covariance;
  const Eigen::Matrix<double, M, M> s = h * p * h.transpose() + r;
  const Eigen::LLT<Eigen::Matrix<double, M, M>> llt(s);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("innovation covariance is not positive definite");
  }
  const Eigen::Matrix<double, kStateDim, M> gain =
      llt.solve(h * p).transpose();  // P H^T S^-1, S and P symmetric
  Track out = track;
  out.state = track.state + gain * innovation;
  out.state(6) = normalize_angle(out.state(6));
  const StateCovariance i_kh = StateCovariance::Identity() - gain * h;
  // Joseph form keeps the posterior symmetric positive semidefinite.
  StateCovariance post = i_kh * p * i_kh.transpose() + gain * r * gain.transpose();
  out.covariance = 0.5 * (post + post.transpose());
  return out;
}

}  // namespace

Track predict(const Track& track, double dt, FrameKind stage, const ClassParams& params) {
  if (!(dt > 0.0)) {
    std::ostringstream err;
    err << "predict: dt must be positive (got " << dt << ")";
    throw ValidationError(err.str());
  }
  const NoiseConfig& noise = params.noise;
  StateCovariance f = StateCovariance::Identity();
  f(0, 7) = dt;
  f(1, 8) = dt;

  StateCovariance q = StateCovariance::Zero();
  const double dt2 = dt * dt;
  const double dt3 = dt2 * dt;
  for (int axis = 0; axis < 2; ++axis) {
    const int pos = axis;
    const int vel = 7 + axis;
    q(pos, pos) = noise.accel_psd * dt3 / 3.0;
    q(pos, vel) = noise.accel_psd * dt2 / 2.0;
    q(vel, pos) = q(pos, vel);
    q(vel, vel) = noise.accel_psd * dt;
  }
  q(2, 2) = noise.z_psd * dt;
  for (int i = 3; i < 6; ++i) q(i, i) = noise.size_psd * dt;
  q(6, 6) = noise.yaw_psd * dt;

  Track out = track;
  out.state = f * track.state;
  const StateCovariance p = f * track.covariance * f.transpose() + q;
  out.covariance = 0.5 * (p + p.transpose());
  const double decay = stage == FrameKind::sync ? params.score.decay_sync : params.score.decay_async;
  out.score = decay * track.score;
  out.last_timestamp = track.last_timestamp + dt;
  return out;
}

Track update_motion(const Track& track, const Box3D& obs, FrameKind stage,
                    const NoiseConfig& noise) {
  Eigen::Matrix<double, kBoxDim, kStateDim> h = Eigen::Matrix<double, kBoxDim, kStateDim>::Zero();
  h.leftCols<kBoxDim>().setIdentity();
  Eigen::Matrix<double, kBoxDim, 1> z;
  z << obs.x, obs.y, obs.z, obs.w, obs.l, obs.h, obs.yaw;
  Eigen::Matrix<double, kBoxDim, 1> innovation = z - h * track.state;
  // Headings that disagree by more than a quarter turn are taken as flipped.
  double dyaw = normalize_angle(innovation(6));
  if (std::abs(dyaw) > 0.5 * std::numbers::pi) dyaw = normalize_angle(dyaw + std::numbers::pi);
  innovation(6) = dyaw;

  const double scale = stage == FrameKind::sync ? 1.0 : noise.gamma;
  Eigen::Matrix<double, kBoxDim, kBoxDim> r = Eigen::Matrix<double, kBoxDim, kBoxDim>::Zero();
  for (int i = 0; i < kBoxDim; ++i) r(i, i) = scale * noise.measurement_var[i];
  return kalman_update<kBoxDim>(track, h, innovation, r);
}

Track update_motion_bev(const Track& track, const Eigen::Vector2d& obs, FrameKind stage,
                        const NoiseConfig& noise) {
  Eigen::Matrix<double, 2, kStateDim> h = Eigen::Matrix<double, 2, kStateDim>::Zero();
  h(0, 0) = 1.0;
  h(1, 1) = 1.0;
  const Eigen::Vector2d innovation = obs - h * track.state;
  const double scale = stage == FrameKind::sync ? 1.0 : noise.gamma;
  Eigen::Matrix2d r = Eigen::Matrix2d::Zero();
  r(0, 0) = scale * noise.measurement_var[0];
  r(1, 1) = scale * noise.measurement_var[1];
  return kalman_update<2>(track, h, innovation, r);
}

Eigen::Vector2d lift_to_bev(const Box2D& box, const CameraModel& cam, const Box3D& predicted) {
  const Eigen::Vector3d origin = cam.center();
  const double range = (Eigen::Vector3d(predicted.x, predicted.y, predicted.z) - origin).norm();
  const Eigen::Vector2d c = box.center();
  const Eigen::Vector3d p = origin + range * cam.pixel_ray(c.x(), c.y());
  return p.head<2>();
}

double fuse_scores(double s3d, double s2d, double alpha) {
  return alpha * s3d + (1.0 - alpha) * s2d;
}

namespace {

// Every operation is monotone under rounding; the max only absorbs the last ulp.
double noisy_or(double a, double b) {
  return std::max({1.0 - (1.0 - a) * (1.0 - b), a, b});
}

}  // namespace

double update_score_sync(double prior, double s_fused) { return noisy_or(prior, s_fused); }

double update_score_async(double prior, double s_single, double beta) {
  return noisy_or(prior, beta * s_single);
}

double combine_score(ScoreStrategy strategy, double prior, double observed, double ema_weight,
                     int count) {
  switch (strategy) {
    case ScoreStrategy::noisy_or: return update_score_sync(prior, observed);
    case ScoreStrategy::average: return prior + (observed - prior) / std::max(count, 1);
    case ScoreStrategy::ema: return ema_weight * prior + (1.0 - ema_weight) * observed;
    case ScoreStrategy::max: return std::max(prior, observed);
  }
  return prior;
}

Track lifecycle_step(const Track& track, MatchOutcome outcome, double observed,
                     const ScoreConfig& cfg, const LifecycleConfig& lifecycle) {
  Track out = track;
  ++out.age;
  if (outcome == MatchOutcome::unmatched) {
    ++out.misses;
  } else {
    ++out.hits;
    out.misses = 0;
  }

  const double effective = outcome == MatchOutcome::matched_async ? cfg.beta * observed : observed;
  if (lifecycle.mode == LifecycleMode::score) {
    if (outcome != MatchOutcome::unmatched) {
      out.score = combine_score(cfg.strategy, track.score, effective, cfg.ema_weight, out.hits);
    }
  } else if (outcome != MatchOutcome::unmatched) {
    out.score = effective;
  }
  out.score = std::clamp(out.score, 0.0, 1.0);
  out.score_history.push_back(out.score);

  if (out.status == TrackStatus::dead) return out;
  if (lifecycle.mode == LifecycleMode::score) {
    if (out.average_score(cfg.average_window) < cfg.delete_threshold) out.status = TrackStatus::dead;
  } else if (out.misses > lifecycle.max_misses) {
    out.status = TrackStatus::dead;
  }
  return out;
}

Track spawn(std::uint64_t id, const Detection3D& det, double initial_score, double timestamp,
            const NoiseConfig& noise) {
  Track t;
  t.id = id;
  t.label = det.label;
  t.state << det.box.x, det.box.y, det.box.z, det.box.w, det.box.l, det.box.h,
      normalize_angle(det.box.yaw), 0.0, 0.0;
  t.covariance = StateCovariance::Zero();
  for (int i = 0; i < kStateDim; ++i) t.covariance(i, i) = noise.initial_var[i];
  t.score = std::clamp(initial_score, 0.0, 1.0);
  t.score_history = {t.score};
  t.last_timestamp = timestamp;
  t.hits = 1;
  t.age = 1;
  t.status = TrackStatus::active;
  return t;
}

Track spawn(std::uint64_t id, const MixDetection& det, double alpha, double timestamp,
            const NoiseConfig& noise) {
  return spawn(id, det.det3d, fuse_scores(det.det3d.score, det.det2d.score, alpha), timestamp,
               noise);
}

Track spawn(std::uint64_t id, const Detection3D& det, double timestamp, const NoiseConfig& noise) {
  return spawn(id, det, det.score, timestamp, noise);
}

double optimal_alpha(double var3d, double var2d) {
  if (!(var3d > 0.0) || !(var2d > 0.0)) {
    throw ValidationError("optimal_alpha: variances must be positive");
  }
  if (std::isinf(var2d)) return std::isinf(var3d) ? 0.5 : 1.0;
  if (std::isinf(var3d)) return 0.0;
  return var2d / (var3d + var2d);
}

double fused_variance(double alpha, double var3d, double var2d) {
  return alpha * alpha * var3d + (1.0 - alpha) * (1.0 - alpha) * var2d;
}

double updated_score_variance(double prior, double input_variance) {
  return (1.0 - prior) * (1.0 - prior) * input_variance;
}

}  // namespace asyncmot
