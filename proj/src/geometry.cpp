#include "asyncmot/geometry.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "asyncmot/errors.hpp"

namespace asyncmot {

namespace {

constexpr double kMinDepth = 1e-6;

double cross(const Eigen::Vector2d& o, const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
  return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
}

std::optional<Box2D> hull_of_visible_corners(const Box3D& box, const CameraModel& cam) {
  double u_min = std::numeric_limits<double>::infinity();
  double v_min = u_min;
  double u_max = -u_min;
  double v_max = -u_min;
  bool any = false;
  for (const auto& corner : box.corners()) {
    const Eigen::Vector3d pc = cam.to_camera(corner);
    if (pc.z() <= kMinDepth) continue;
    const Eigen::Vector3d uv = cam.intrinsic * pc;
    const double u = uv.x() / uv.z();
    const double v = uv.y() / uv.z();
    u_min = std::min(u_min, u);
    u_max = std::max(u_max, u);
    v_min = std::min(v_min, v);
    v_max = std::max(v_max, v);
    any = true;
  }
  if (!any) return std::nullopt;
  return Box2D{u_min, v_min, u_max, v_max};
}

}  // namespace

double normalize_angle(double rad) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double r = std::fmod(rad, two_pi);
  if (r <= -std::numbers::pi) r += two_pi;
  if (r > std::numbers::pi) r -= two_pi;
  return r;
}

bool Box3D::valid() const {
  return w > 0.0 && l > 0.0 && h > 0.0 && std::isfinite(x) && std::isfinite(y) &&
         std::isfinite(z) && std::isfinite(yaw);
}

std::array<Eigen::Vector2d, 4> Box3D::bev_corners() const {
  const double c = std::cos(yaw);
  const double s = std::sin(yaw);
  const double hl = 0.5 * l;
  const double hw = 0.5 * w;
  const std::array<std::pair<double, double>, 4> local{{{hl, hw}, {-hl, hw}, {-hl, -hw}, {hl, -hw}}};
  std::array<Eigen::Vector2d, 4> out;
  for (std::size_t i = 0; i < 4; ++i) {
    const auto [lx, ly] = local[i];
    out[i] = {x + c * lx - s * ly, y + s * lx + c * ly};
  }
  return out;
}

std::array<Eigen::Vector3d, 8> Box3D::corners() const {
  const auto footprint = bev_corners();
  std::array<Eigen::Vector3d, 8> out;
  for (std::size_t i = 0; i < 4; ++i) {
    out[i] = {footprint[i].x(), footprint[i].y(), z - 0.5 * h};
    out[i + 4] = {footprint[i].x(), footprint[i].y(), z + 0.5 * h};
  }
  return out;
}

void CameraModel::validate() const {
  std::ostringstream err;
  if (!(intrinsic(0, 0) > 0.0) || !(intrinsic(1, 1) > 0.0)) {
    err << "camera " << id << ": focal entries must be positive";
    throw ValidationError(err.str());
  }
  const double ortho = (rotation.transpose() * rotation - Eigen::Matrix3d::Identity()).norm();
  if (!(ortho < 1e-9)) {
    err << "camera " << id << ": rotation is not orthonormal (|R^T R - I| = " << ortho << ")";
    throw ValidationError(err.str());
  }
  if (width <= 0 || height <= 0) {
    err << "camera " << id << ": image size must be positive";
    throw ValidationError(err.str());
  }
  if (!translation.allFinite()) {
    err << "camera " << id << ": translation is not finite";
    throw ValidationError(err.str());
  }
}

Eigen::Vector3d CameraModel::pixel_ray(double u, double v) const {
  const Eigen::Vector3d dir_cam = intrinsic.inverse() * Eigen::Vector3d(u, v, 1.0);
  return (rotation.transpose() * dir_cam).normalized();
}

CameraModel CameraModel::looking_at_heading(int id, const Eigen::Vector3d& position, double yaw,
                                            double focal, int width, int height) {
  const Eigen::Vector3d forward(std::cos(yaw), std::sin(yaw), 0.0);
  const Eigen::Vector3d right(std::sin(yaw), -std::cos(yaw), 0.0);
  const Eigen::Vector3d down(0.0, 0.0, -1.0);
  Eigen::Matrix3d cam_to_global;
  cam_to_global.col(0) = right;
  cam_to_global.col(1) = down;
  cam_to_global.col(2) = forward;

  CameraModel cam;
  cam.id = id;
  cam.intrinsic << focal, 0.0, 0.5 * width, 0.0, focal, 0.5 * height, 0.0, 0.0, 1.0;
  cam.rotation = cam_to_global.transpose();
  cam.translation = -cam.rotation * position;
  cam.width = width;
  cam.height = height;
  return cam;
}

std::optional<Box2D> project_box_unclipped(const Box3D& box, const CameraModel& cam) {
  return hull_of_visible_corners(box, cam);
}

std::optional<Box2D> project_box(const Box3D& box, const CameraModel& cam) {
  auto hull = hull_of_visible_corners(box, cam);
  if (!hull) return std::nullopt;
  Box2D clipped{std::clamp(hull->x1, 0.0, double(cam.width)),
                std::clamp(hull->y1, 0.0, double(cam.height)),
                std::clamp(hull->x2, 0.0, double(cam.width)),
                std::clamp(hull->y2, 0.0, double(cam.height))};
  if (clipped.width() <= 0.0 || clipped.height() <= 0.0) return std::nullopt;
  return clipped;
}

double iou_2d(const Box2D& a, const Box2D& b) {
  const double iw = std::min(a.x2, b.x2) - std::max(a.x1, b.x1);
  const double ih = std::min(a.y2, b.y2) - std::max(a.y1, b.y1);
  const double inter = (iw > 0.0 && ih > 0.0) ? iw * ih : 0.0;
  const double uni = a.area() + b.area() - inter;
  if (uni <= 0.0) return 0.0;
  return inter / uni;
}

double giou_2d(const Box2D& a, const Box2D& b) {
  const double iw = std::min(a.x2, b.x2) - std::max(a.x1, b.x1);
  const double ih = std::min(a.y2, b.y2) - std::max(a.y1, b.y1);
  const double inter = (iw > 0.0 && ih > 0.0) ? iw * ih : 0.0;
  const double uni = a.area() + b.area() - inter;
  const double hull = (std::max(a.x2, b.x2) - std::min(a.x1, b.x1)) *
                      (std::max(a.y2, b.y2) - std::min(a.y1, b.y1));
  if (uni <= 0.0 || hull <= 0.0) return 0.0;
  return inter / uni - (hull - uni) / hull;
}

double polygon_area(std::span<const Eigen::Vector2d> poly) {
  if (poly.size() < 3) return 0.0;
  double twice = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const auto& p = poly[i];
    const auto& q = poly[(i + 1) % poly.size()];
    twice += p.x() * q.y() - q.x() * p.y();
  }
  return 0.5 * twice;
}

Polygon2 convex_clip(std::span<const Eigen::Vector2d> subject, std::span<const Eigen::Vector2d> clip) {
  Polygon2 output(subject.begin(), subject.end());
  for (std::size_t i = 0; i < clip.size() && !output.empty(); ++i) {
    const Eigen::Vector2d& a = clip[i];
    const Eigen::Vector2d& b = clip[(i + 1) % clip.size()];
    const Polygon2 input = std::move(output);
    output.clear();
    for (std::size_t j = 0; j < input.size(); ++j) {
      const Eigen::Vector2d& p = input[j];
      const Eigen::Vector2d& q = input[(j + 1) % input.size()];
      const double sp = cross(a, b, p);
      const double sq = cross(a, b, q);
      if (sp >= 0.0) output.push_back(p);
      if ((sp >= 0.0) != (sq >= 0.0)) {
        const double t = sp / (sp - sq);
        output.push_back(p + t * (q - p));
      }
    }
  }
  return output;
}

Polygon2 convex_hull(std::vector<Eigen::Vector2d> points) {
  std::sort(points.begin(), points.end(), [](const auto& a, const auto& b) {
    return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
  });
  if (points.size() < 3) return points;
  Polygon2 hull(2 * points.size());
  std::size_t k = 0;
  for (const auto& p : points) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0.0) --k;
    hull[k++] = p;
  }
  for (std::size_t i = points.size() - 1, lower = k + 1; i-- > 0;) {
    while (k >= lower && cross(hull[k - 2], hull[k - 1], points[i]) <= 0.0) --k;
    hull[k++] = points[i];
  }
  hull.resize(k - 1);
  return hull;
}

namespace {

struct BevOverlap {
  double inter = 0.0;
  double uni = 0.0;
  double hull = 0.0;
};

BevOverlap bev_overlap(const Box3D& a, const Box3D& b, bool with_hull) {
  const auto pa = a.bev_corners();
  const auto pb = b.bev_corners();
  BevOverlap out;
  out.inter = std::max(0.0, polygon_area(convex_clip(pa, pb)));
  out.uni = a.w * a.l + b.w * b.l - out.inter;
  if (with_hull) {
    std::vector<Eigen::Vector2d> all(pa.begin(), pa.end());
    all.insert(all.end(), pb.begin(), pb.end());
    out.hull = polygon_area(convex_hull(std::move(all)));
  }
  return out;
}

}  // namespace

double bev_iou(const Box3D& a, const Box3D& b) {
  const auto o = bev_overlap(a, b, false);
  if (o.uni <= 0.0) return 0.0;
  return std::clamp(o.inter / o.uni, 0.0, 1.0);
}

double bev_giou_3d(const Box3D& a, const Box3D& b) {
  const auto o = bev_overlap(a, b, true);
  if (o.uni <= 0.0 || o.hull <= 0.0) return 0.0;
  const double iou = std::clamp(o.inter / o.uni, 0.0, 1.0);
  const double excess = std::max(0.0, o.hull - o.uni) / o.hull;
  return iou - excess;
}

std::optional<CameraProjection> best_camera_match(const Box3D& box,
                                                  std::span<const CameraModel> cams) {
  std::optional<CameraProjection> best;
  double best_area = 0.0;
  for (const auto& cam : cams) {
    const auto proj = project_box(box, cam);
    if (!proj) continue;
    if (!best || proj->area() > best_area) {
      best = CameraProjection{cam.id, *proj};
      best_area = proj->area();
    }
  }
  return best;
}

const CameraModel* find_camera(std::span<const CameraModel> cams, int id) {
  for (const auto& cam : cams) {
    if (cam.id == id) return &cam;
  }
  return nullptr;
}

}  // namespace asyncmot
