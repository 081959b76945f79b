#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace asg {

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  Vec3 operator-() const { return {-x, -y, -z}; }
  double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
  Vec3 cross(const Vec3& o) const {
    return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
  }
  double norm() const { return std::sqrt(x * x + y * y + z * z); }
  Vec3 normalized() const {
    const double n = norm();
    return {x / n, y / n, z / n};
  }
};

struct Vec2 {
  double x = 0.0, y = 0.0;
};

// Row-major 3x3 rotation.
struct Mat3 {
  std::array<double, 9> m{1, 0, 0, 0, 1, 0, 0, 0, 1};

  static Mat3 identity() { return {}; }
  static Mat3 rot_x(double angle);
  static Mat3 rot_y(double angle);
  static Mat3 rot_z(double angle);
  // Rotation taking camera axes (x right, y down, z forward) to world axes
  // (z up) for a sensor with the given heading and downward pitch.
  static Mat3 camera_to_world(double heading, double pitch_down);

  Vec3 apply(const Vec3& v) const {
    return {m[0] * v.x + m[1] * v.y + m[2] * v.z,
            m[3] * v.x + m[4] * v.y + m[5] * v.z,
            m[6] * v.x + m[7] * v.y + m[8] * v.z};
  }
  Mat3 operator*(const Mat3& o) const;
  Mat3 transposed() const;
  bool is_orthonormal(double tol = 1e-9) const;
};

struct Pose {
  Mat3 rotation;
  Vec3 translation;

  static Pose identity() { return {}; }
  Vec3 apply(const Vec3& p) const { return rotation.apply(p) + translation; }
  Pose compose(const Pose& other) const {
    return {rotation * other.rotation, rotation.apply(other.translation) + translation};
  }
  Pose inverse() const {
    const Mat3 rt = rotation.transposed();
    return {rt, -rt.apply(translation)};
  }
  bool is_identity(double tol = 1e-9) const;
};

Pose make_camera_pose(const Vec3& position, double heading, double pitch_down);

// Gravity-aligned box: orientation is yaw about z only.
struct OrientedBox {
  Vec3 center;
  double yaw = 0.0;           // canonical range [-pi/2, pi/2)
  Vec3 extents{0.01, 0.01, 0.01};  // full side lengths, >= kMinExtent each

  static constexpr double kMinExtent = 0.01;

  double zmin() const { return center.z - 0.5 * extents.z; }
  double zmax() const { return center.z + 0.5 * extents.z; }
  double footprint_area() const { return extents.x * extents.y; }
  double volume() const { return extents.x * extents.y * extents.z; }
  std::array<Vec2, 4> footprint_corners() const;
  bool contains(const Vec3& p, double tol = 1e-9) const;
};

double canonical_yaw(double yaw);

struct CameraModel {
  double horizontal_fov = 1.221730476396031;  // 70 degrees
  int width = 64;
  int height = 48;
  double max_range = 6.0;

  void validate() const;  // throws std::invalid_argument
  // Unit ray directions in the camera frame (x right, y down, z forward),
  // raster order (row major, top row first).
  std::vector<Vec3> pixel_rays() const;
};

// Factored per-view geometry: rays and up-to-scale depths in raster order
// (struct-of-arrays), the view pose relative to the batch reference, and the
// batch-shared metric scale.
struct FactoredView {
  std::vector<double> ray_x, ray_y, ray_z;
  std::vector<double> depth;
  std::vector<std::uint8_t> valid;
  Pose relative_pose;
  double metric_scale = 1.0;

  std::size_t pixel_count() const { return depth.size(); }
  void validate() const;  // throws std::invalid_argument on invariant violation
};

// Metric back-projection of one view into the batch reference frame; outputs
// follow pixel raster order restricted to valid pixels.
std::vector<Vec3> compose_backprojection(const FactoredView& view);

// Points in an arbitrary frame lifted to the global frame with a metric scale,
// same math as compose_backprojection.
std::vector<Vec3> lift_points(const Pose& global_pose, double metric_scale,
                              std::span<const Vec3> points_local);

std::vector<Pose> anchor_poses(const Pose& first_view_global,
                               const std::vector<Pose>& relative_poses);

// Minimum-area footprint fit (convex hull + rotating calipers) with the
// vertical extent taken from the z range. Extents are clamped to kMinExtent.
OrientedBox fit_oriented_box(std::span<const Vec3> points);

// Intersection area of the two yaw-rotated footprint rectangles.
double footprint_intersection_area(const OrientedBox& a, const OrientedBox& b);
// Intersection area normalized by the smaller footprint, in [0, 1].
double footprint_overlap(const OrientedBox& a, const OrientedBox& b);
// 3D intersection volume (clipped footprint x vertical interval overlap).
double box_intersection_volume(const OrientedBox& a, const OrientedBox& b);
// vol(a ∩ b) / vol(a), in [0, 1].
double containment_fraction(const OrientedBox& a, const OrientedBox& b);
double box_iou(const OrientedBox& a, const OrientedBox& b);
// Minimum horizontal distance between the two footprint rectangles (0 if they
// overlap).
double footprint_distance(const OrientedBox& a, const OrientedBox& b);

// Deterministic voxel downsampling: keeps the first point seen per leaf cell,
// in input order.
std::vector<Vec3> voxel_downsample(std::span<const Vec3> points, double leaf);

}  // namespace asg
