#pragma once

#include <array>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace asyncmot {

/// Wraps an angle to (-pi, pi].
double normalize_angle(double rad);

/// Oriented 3D box in the global frame (z up). `l` runs along the heading,
/// `w` across it, `h` vertically; (x, y, z) is the geometric center.
struct Box3D {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double w = 1.0;
  double l = 1.0;
  double h = 1.0;
  double yaw = 0.0;

  bool valid() const;
  std::array<Eigen::Vector3d, 8> corners() const;
  /// Footprint corners in counter-clockwise order.
  std::array<Eigen::Vector2d, 4> bev_corners() const;

  bool operator==(const Box3D&) const = default;
};

/// Axis-aligned pixel rectangle, (x1, y1) top-left and (x2, y2) bottom-right.
struct Box2D {
  double x1 = 0.0;
  double y1 = 0.0;
  double x2 = 0.0;
  double y2 = 0.0;

  bool valid() const { return x2 >= x1 && y2 >= y1; }
  double width() const { return x2 - x1; }
  double height() const { return y2 - y1; }
  double area() const { return width() * height(); }
  Eigen::Vector2d center() const { return {0.5 * (x1 + x2), 0.5 * (y1 + y2)}; }

  bool operator==(const Box2D&) const = default;
};

/// Pinhole camera. The extrinsic maps global points into the camera frame
/// (x right, y down, z forward): p_cam = rotation * p_global + translation.
struct CameraModel {
  int id = 0;
  Eigen::Matrix3d intrinsic = Eigen::Matrix3d::Identity();
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();
  int width = 0;
  int height = 0;

  /// Throws ValidationError when the focal entries are non-positive, the
  /// rotation is not orthonormal, or the image size is empty.
  void validate() const;

  Eigen::Vector3d to_camera(const Eigen::Vector3d& p_global) const {
    return rotation * p_global + translation;
  }
  Eigen::Vector3d center() const { return -rotation.transpose() * translation; }

  /// Unit ray in the global frame through pixel (u, v).
  Eigen::Vector3d pixel_ray(double u, double v) const;

  /// Builds a camera at `position` looking along heading `yaw` (radians, about
  /// the global z axis), level with the ground.
  static CameraModel looking_at_heading(int id, const Eigen::Vector3d& position, double yaw,
                                        double focal, int width, int height);

  bool operator==(const CameraModel&) const = default;
};

/// Axis-aligned hull of the projected corners, clipped to the image. Corners
/// with non-positive depth are dropped first. Absent when nothing is in front
/// of the camera or the clipped rectangle has zero area.
std::optional<Box2D> project_box(const Box3D& box, const CameraModel& cam);

/// Same hull without clipping to the image. Absent when no corner is in front.
std::optional<Box2D> project_box_unclipped(const Box3D& box, const CameraModel& cam);

double iou_2d(const Box2D& a, const Box2D& b);
double giou_2d(const Box2D& a, const Box2D& b);

using Polygon2 = std::vector<Eigen::Vector2d>;

/// Shoelace area; positive for counter-clockwise polygons.
double polygon_area(std::span<const Eigen::Vector2d> poly);
/// Intersection of two convex counter-clockwise polygons.
Polygon2 convex_clip(std::span<const Eigen::Vector2d> subject, std::span<const Eigen::Vector2d> clip);
/// Counter-clockwise convex hull (monotone chain).
Polygon2 convex_hull(std::vector<Eigen::Vector2d> points);

/// Bird's-eye-view IoU of the rotated footprints.
double bev_iou(const Box3D& a, const Box3D& b);
/// Bird's-eye-view generalized IoU with the convex hull of both footprints as
/// the enclosing region.
double bev_giou_3d(const Box3D& a, const Box3D& b);

struct CameraProjection {
  int camera_id = 0;
  Box2D box;
};

/// Projection into the camera where the box covers the largest pixel area.
std::optional<CameraProjection> best_camera_match(const Box3D& box,
                                                  std::span<const CameraModel> cams);

const CameraModel* find_camera(std::span<const CameraModel> cams, int id);

}  // namespace asyncmot
