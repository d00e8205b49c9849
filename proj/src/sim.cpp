#include "asyncmot/sim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Geometry>

#include "asyncmot/errors.hpp"

namespace asyncmot {

namespace {

constexpr double kTimeEps = 1e-9;

struct ClassShape {
  double w, l, h;
};

ClassShape shape_of(const std::string& label) {
  if (label == "pedestrian") return {0.7, 0.7, 1.75};
  if (label == "bicycle") return {0.6, 1.8, 1.3};
  if (label == "truck") return {2.5, 7.0, 3.0};
  return {1.9, 4.5, 1.6};
}

void require(bool ok, const char* what) {
  if (!ok) throw ValidationError(std::string("invalid scenario: ") + what);
}

bool is_probability(double p) { return p >= 0.0 && p <= 1.0; }

}  // namespace

const char* to_string(MotionPattern m) {
  switch (m) {
    case MotionPattern::constant_velocity: return "constant_velocity";
    case MotionPattern::stop_and_go: return "stop_and_go";
    case MotionPattern::turning: return "turning";
  }
  return "?";
}

MotionPattern parse_motion_pattern(const std::string& name) {
  if (name == "constant_velocity") return MotionPattern::constant_velocity;
  if (name == "stop_and_go") return MotionPattern::stop_and_go;
  if (name == "turning") return MotionPattern::turning;
  throw ValidationError("unknown motion pattern '" + name + "'");
}

void ScenarioConfig::validate() const {
  require(duration > 0.0, "duration must be > 0");
  require(sync_rate > 0.0 && async_rate > 0.0, "rates must be > 0");
  require(async_rate >= sync_rate, "async rate must be >= sync rate");
  require(is_probability(lidar_dropout) && is_probability(camera_dropout) &&
              is_probability(lidar_frame_dropout) && is_probability(score_dip_prob),
          "probabilities must be in [0, 1]");
  require(score_dip_factor >= 0.0 && score_dip_factor <= 1.0, "score_dip_factor must be in [0, 1]");
  require(false_positive_rate_3d >= 0.0 && false_positive_rate_2d >= 0.0,
          "false positive rates must be >= 0");
  require(false_positive_score_min >= 0.0 && false_positive_score_max <= 1.0 &&
              false_positive_score_min <= false_positive_score_max,
          "false positive score band must lie in [0, 1]");
  require(noise.position >= 0.0 && noise.size >= 0.0 && noise.yaw >= 0.0 && noise.pixel >= 0.0,
          "noise levels must be >= 0");
  require(scores.sigma >= 0.0, "score sigma must be >= 0");
  require(extrinsic_sigma >= 0.0, "extrinsic_sigma must be >= 0");
  for (const auto& o : objects) {
    require(o.w > 0.0 && o.l > 0.0 && o.h > 0.0, "object dimensions must be > 0");
    require(o.cycle > 0.0, "stop-and-go cycle must be > 0");
    require(o.despawn_time > o.spawn_time, "object despawn must follow spawn");
  }
  for (const auto& c : cameras) c.validate();
}

std::vector<CameraModel> default_camera_rig() {
  std::vector<CameraModel> rig;
  for (int i = 0; i < 6; ++i) {
    const double yaw = i * std::numbers::pi / 3.0;
    rig.push_back(CameraModel::looking_at_heading(i, Eigen::Vector3d(0.0, 0.0, 1.6), yaw, 1266.0,
                                                  1600, 900));
  }
  return rig;
}

std::vector<std::pair<double, FrameKind>> frame_schedule(const ScenarioConfig& cfg) {
  std::vector<std::pair<double, FrameKind>> out;
  for (long i = 0;; ++i) {
    const double t = static_cast<double>(i) / cfg.sync_rate;
    if (t >= cfg.duration - kTimeEps) break;
    out.emplace_back(t, FrameKind::sync);
  }
  for (long i = 0;; ++i) {
    const double t = static_cast<double>(i) / cfg.async_rate;
    if (t >= cfg.duration - kTimeEps) break;
    const double k = t * cfg.sync_rate;
    if (std::abs(k - std::round(k)) * (1.0 / cfg.sync_rate) < 1e-6) continue;
    out.emplace_back(t, FrameKind::async);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::optional<GtObject> object_state(const ObjectSpec& spec, std::uint64_t id, double t) {
  if (t < spec.spawn_time - kTimeEps || t >= spec.despawn_time - kTimeEps) return std::nullopt;
  const double tau = t - spec.spawn_time;
  double x = spec.x;
  double y = spec.y;
  double yaw = spec.yaw;
  double speed = spec.speed;
  switch (spec.motion) {
    case MotionPattern::constant_velocity:
      x += spec.speed * tau * std::cos(yaw);
      y += spec.speed * tau * std::sin(yaw);
      break;
    case MotionPattern::stop_and_go: {
      const double half = 0.5 * spec.cycle;
      const double cycles = std::floor(tau / spec.cycle);
      const double rem = tau - cycles * spec.cycle;
      const double moving_time = cycles * half + std::min(rem, half);
      x += spec.speed * moving_time * std::cos(yaw);
      y += spec.speed * moving_time * std::sin(yaw);
      if (rem >= half) speed = 0.0;
      break;
    }
    case MotionPattern::turning: {
      const double w = spec.turn_rate;
      if (std::abs(w) < 1e-9) {
        x += spec.speed * tau * std::cos(yaw);
        y += spec.speed * tau * std::sin(yaw);
      } else {
        const double yaw_t = yaw + w * tau;
        x += spec.speed / w * (std::sin(yaw_t) - std::sin(yaw));
        y -= spec.speed / w * (std::cos(yaw_t) - std::cos(yaw));
        yaw = yaw_t;
      }
      break;
    }
  }
  GtObject obj;
  obj.id = id;
  obj.label = spec.label;
  obj.box = Box3D{x, y, 0.5 * spec.h, spec.w, spec.l, spec.h, normalize_angle(yaw)};
  obj.velocity = {speed * std::cos(yaw), speed * std::sin(yaw)};
  return obj;
}

std::vector<CameraModel> perturb_extrinsics(const std::vector<CameraModel>& cams, double sigma,
                                            std::uint64_t seed) {
  if (sigma < 0.0) throw ValidationError("perturb_extrinsics: sigma must be >= 0");
  if (sigma == 0.0) return cams;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, sigma);
  std::vector<CameraModel> out = cams;
  for (auto& cam : out) {
    const Eigen::Vector3d omega(gauss(rng), gauss(rng), gauss(rng));
    const Eigen::Vector3d dt(gauss(rng), gauss(rng), gauss(rng));
    const double angle = omega.norm();
    const Eigen::Matrix3d delta =
        angle > 0.0 ? Eigen::AngleAxisd(angle, omega / angle).toRotationMatrix()
                    : Eigen::Matrix3d::Identity();
    Eigen::Quaterniond q(delta * cam.rotation);
    q.normalize();
    cam.rotation = q.toRotationMatrix();
    cam.translation += dt;
  }
  return out;
}

Scene generate(const ScenarioConfig& cfg) {
  cfg.validate();
  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> unit_gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto gauss = [&](double sigma) { return sigma > 0.0 ? sigma * unit_gauss(rng) : 0.0; };
  auto draw_score = [&](double mean) {
    return std::clamp(mean + gauss(cfg.scores.sigma), 0.01, 1.0);
  };
  auto draw_fp_score = [&] {
    return cfg.false_positive_score_min +
           (cfg.false_positive_score_max - cfg.false_positive_score_min) * unit(rng);
  };
  auto draw_count = [&](double rate) {
    if (rate <= 0.0) return 0;
    std::poisson_distribution<int> poisson(rate);
    return poisson(rng);
  };

  const std::vector<CameraModel> true_cams = cfg.cameras.empty() ? default_camera_rig() : cfg.cameras;
  const std::vector<CameraModel> believed =
      perturb_extrinsics(true_cams, cfg.extrinsic_sigma, cfg.seed ^ 0x9e3779b97f4a7c15ULL);

  std::vector<std::string> labels;
  for (const auto& o : cfg.objects) {
    if (std::find(labels.begin(), labels.end(), o.label) == labels.end()) labels.push_back(o.label);
  }
  if (labels.empty()) labels.push_back("car");

  Scene scene;
  scene.id = "sim-" + std::to_string(cfg.seed);
  scene.cameras = believed;
  GroundTruth gt;

  for (const auto& [t, kind] : frame_schedule(cfg)) {
    Frame frame;
    frame.timestamp = t;
    frame.kind = kind;
    frame.cameras = believed;
    GtFrame gframe;
    gframe.timestamp = t;
    gframe.kind = kind;

    const bool sweep_missing = kind == FrameKind::sync && unit(rng) < cfg.lidar_frame_dropout;
    for (std::size_t i = 0; i < cfg.objects.size(); ++i) {
      const auto obj = object_state(cfg.objects[i], i + 1, t);
      if (!obj) continue;
      gframe.objects.push_back(*obj);

      if (kind == FrameKind::sync && !sweep_missing) {
        const double range = std::hypot(obj->box.x, obj->box.y);
        const bool dropped = unit(rng) < cfg.lidar_dropout;
        if (range <= cfg.lidar_range && !dropped) {
          Detection3D det;
          det.box = obj->box;
          det.box.x += gauss(cfg.noise.position);
          det.box.y += gauss(cfg.noise.position);
          det.box.z += gauss(cfg.noise.position);
          det.box.w = std::max(0.1, det.box.w + gauss(cfg.noise.size));
          det.box.l = std::max(0.1, det.box.l + gauss(cfg.noise.size));
          det.box.h = std::max(0.1, det.box.h + gauss(cfg.noise.size));
          det.box.yaw = normalize_angle(det.box.yaw + gauss(cfg.noise.yaw));
          det.score = draw_score(cfg.scores.mean_3d);
          if (unit(rng) < cfg.score_dip_prob) det.score *= cfg.score_dip_factor;
          det.label = obj->label;
          det.timestamp = t;
          frame.dets3d.push_back(det);
        }
      }

      const auto proj = best_camera_match(obj->box, true_cams);
      const bool cam_dropped = unit(rng) < cfg.camera_dropout;
      if (proj && !cam_dropped) {
        const CameraModel& cam = *find_camera(true_cams, proj->camera_id);
        Box2D b = proj->box;
        b.x1 += gauss(cfg.noise.pixel);
        b.y1 += gauss(cfg.noise.pixel);
        b.x2 += gauss(cfg.noise.pixel);
        b.y2 += gauss(cfg.noise.pixel);
        b = Box2D{std::clamp(std::min(b.x1, b.x2), 0.0, double(cam.width)),
                  std::clamp(std::min(b.y1, b.y2), 0.0, double(cam.height)),
                  std::clamp(std::max(b.x1, b.x2), 0.0, double(cam.width)),
                  std::clamp(std::max(b.y1, b.y2), 0.0, double(cam.height))};
        if (b.area() > 0.0) {
          Detection2D det;
          det.box = b;
          det.score = draw_score(kind == FrameKind::sync ? cfg.scores.mean_2d_sync
                                                         : cfg.scores.mean_2d_async);
          det.label = obj->label;
          det.camera_id = cam.id;
          det.timestamp = t;
          frame.dets2d.push_back(det);
        }
      }
    }

    if (kind == FrameKind::sync && !sweep_missing) {
      const int n_fp = draw_count(cfg.false_positive_rate_3d);
      for (int k = 0; k < n_fp; ++k) {
        const std::string& label = labels[static_cast<std::size_t>(unit(rng) * labels.size()) % labels.size()];
        const ClassShape s = shape_of(label);
        Detection3D det;
        det.box = Box3D{(2.0 * unit(rng) - 1.0) * cfg.false_positive_region,
                        (2.0 * unit(rng) - 1.0) * cfg.false_positive_region,
                        0.5 * s.h, s.w, s.l, s.h, normalize_angle(2.0 * std::numbers::pi * unit(rng))};
        det.score = draw_fp_score();
        det.label = label;
        det.timestamp = t;
        frame.dets3d.push_back(det);
      }
    }
    const int n_fp2d = draw_count(cfg.false_positive_rate_2d);
    for (int k = 0; k < n_fp2d; ++k) {
      const CameraModel& cam = true_cams[static_cast<std::size_t>(unit(rng) * true_cams.size()) % true_cams.size()];
      const std::string& label = labels[static_cast<std::size_t>(unit(rng) * labels.size()) % labels.size()];
      const double bw = 30.0 + 120.0 * unit(rng);
      const double bh = 30.0 + 120.0 * unit(rng);
      const double x1 = unit(rng) * (cam.width - bw);
      const double y1 = unit(rng) * (cam.height - bh);
      Detection2D det;
      det.box = Box2D{x1, y1, x1 + bw, y1 + bh};
      det.score = draw_fp_score();
      det.label = label;
      det.camera_id = cam.id;
      det.timestamp = t;
      frame.dets2d.push_back(det);
    }

    scene.frames.push_back(std::move(frame));
    gt.frames.push_back(std::move(gframe));
  }
  scene.gt = std::move(gt);
  return scene;
}

ScenarioConfig designed_scenario(std::uint64_t seed, double extrinsic_sigma) {
  ScenarioConfig cfg;
  cfg.duration = 20.0;
  cfg.seed = seed;
  cfg.extrinsic_sigma = extrinsic_sigma;
  cfg.noise = SensorNoise{0.25, 0.1, 0.05, 3.0};
  cfg.scores = ScoreModel{0.75, 0.7, 0.6, 0.12};
  cfg.lidar_dropout = 0.2;
  cfg.lidar_frame_dropout = 0.1;
  cfg.camera_dropout = 0.1;
  cfg.score_dip_prob = 0.2;
  cfg.score_dip_factor = 0.3;
  cfg.false_positive_rate_3d = 1.0;
  cfg.false_positive_rate_2d = 1.0;

  std::mt19937_64 rng(seed * 7919 + 17);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int n_objects = 8;
  for (int i = 0; i < n_objects; ++i) {
    ObjectSpec o;
    const bool pedestrian = unit(rng) < 0.3;
    o.label = pedestrian ? "pedestrian" : "car";
    const ClassShape s = shape_of(o.label);
    o.w = s.w;
    o.l = s.l;
    o.h = s.h;
    const double bearing = 2.0 * std::numbers::pi * (i + 0.6 * unit(rng)) / n_objects;
    const double range = 10.0 + 22.0 * unit(rng);
    o.x = range * std::cos(bearing);
    o.y = range * std::sin(bearing);
    o.yaw = normalize_angle(2.0 * std::numbers::pi * unit(rng));
    o.speed = pedestrian ? 0.5 + 1.2 * unit(rng) : 1.0 + 6.0 * unit(rng);
    const double pick = unit(rng);
    o.motion = pick < 0.5 ? MotionPattern::constant_velocity
                          : (pick < 0.75 ? MotionPattern::stop_and_go : MotionPattern::turning);
    o.turn_rate = (unit(rng) - 0.5) * 0.4;
    o.cycle = 3.0 + 3.0 * unit(rng);
    o.spawn_time = std::floor(unit(rng) * 16.0) * 0.5 * (unit(rng) < 0.5 ? 0.0 : 1.0);
    o.despawn_time = std::min(cfg.duration, o.spawn_time + 8.0 + 12.0 * unit(rng));
    cfg.objects.push_back(o);
  }
  return cfg;
}

ScenarioConfig noiseless_scenario(std::uint64_t seed, int n_objects, double duration) {
  ScenarioConfig cfg;
  cfg.duration = duration;
  cfg.seed = seed;
  cfg.scores = ScoreModel{0.9, 0.9, 0.9, 0.0};
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < n_objects; ++i) {
    ObjectSpec o;
    const double bearing = 2.0 * std::numbers::pi * i / n_objects + 0.3 * unit(rng);
    const double range = 15.0 + 5.0 * unit(rng);
    o.x = range * std::cos(bearing);
    o.y = range * std::sin(bearing);
    // Move radially outward so objects never approach each other.
    o.yaw = bearing;
    o.speed = 0.5 + 1.0 * unit(rng);
    cfg.objects.push_back(o);
  }
  return cfg;
}

}  // namespace asyncmot
