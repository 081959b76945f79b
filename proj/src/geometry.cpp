#include "asg/geometry.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_set>

#include "asg/kernels.hpp"

namespace asg {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

Mat3 Mat3::rot_x(double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  Mat3 r;
  r.m = {1, 0, 0, 0, c, -s, 0, s, c};
  return r;
}

Mat3 Mat3::rot_y(double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  Mat3 r;
  r.m = {c, 0, s, 0, 1, 0, -s, 0, c};
  return r;
}

Mat3 Mat3::rot_z(double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  Mat3 r;
  r.m = {c, -s, 0, s, c, 0, 0, 0, 1};
  return r;
}

Mat3 Mat3::camera_to_world(double heading, double pitch_down) {
  const double cy = std::cos(heading), sy = std::sin(heading);
  const double cp = std::cos(pitch_down), sp = std::sin(pitch_down);
  const Vec3 forward{cy * cp, sy * cp, -sp};
  const Vec3 right = forward.cross(Vec3{0, 0, 1}).normalized();
  const Vec3 down = forward.cross(right);
  Mat3 r;
  // Columns are the camera axes expressed in world coordinates.
  r.m = {right.x, down.x, forward.x,
         right.y, down.y, forward.y,
         right.z, down.z, forward.z};
  return r;
}

Mat3 Mat3::operator*(const Mat3& o) const {
  Mat3 r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      r.m[static_cast<std::size_t>(3 * i + j)] =
          m[static_cast<std::size_t>(3 * i)] * o.m[static_cast<std::size_t>(j)] +
          m[static_cast<std::size_t>(3 * i + 1)] * o.m[static_cast<std::size_t>(3 + j)] +
          m[static_cast<std::size_t>(3 * i + 2)] * o.m[static_cast<std::size_t>(6 + j)];
    }
  return r;
}

Mat3 Mat3::transposed() const {
  Mat3 r;
  r.m = {m[0], m[3], m[6], m[1], m[4], m[7], m[2], m[5], m[8]};
  return r;
}

bool Mat3::is_orthonormal(double tol) const {
  const Mat3 prod = *this * transposed();
  const Mat3 id;
  for (int i = 0; i < 9; ++i)
    if (std::abs(prod.m[static_cast<std::size_t>(i)] - id.m[static_cast<std::size_t>(i)]) > tol)
      return false;
  // det(+1): expand along the first row.
  const double det = m[0] * (m[4] * m[8] - m[5] * m[7]) -
                     m[1] * (m[3] * m[8] - m[5] * m[6]) +
                     m[2] * (m[3] * m[7] - m[4] * m[6]);
  return std::abs(det - 1.0) <= tol;
}

bool Pose::is_identity(double tol) const {
  const Mat3 id;
  for (int i = 0; i < 9; ++i)
    if (std::abs(rotation.m[static_cast<std::size_t>(i)] - id.m[static_cast<std::size_t>(i)]) > tol)
      return false;
  return std::abs(translation.x) <= tol && std::abs(translation.y) <= tol &&
         std::abs(translation.z) <= tol;
}

Pose make_camera_pose(const Vec3& position, double heading, double pitch_down) {
  return {Mat3::camera_to_world(heading, pitch_down), position};
}

double canonical_yaw(double yaw) {
  double r = std::remainder(yaw, kPi);  // [-pi/2, pi/2]
  if (r >= kPi / 2.0) r -= kPi;
  return r;
}

std::array<Vec2, 4> OrientedBox::footprint_corners() const {
  const double c = std::cos(yaw), s = std::sin(yaw);
  const double ex = 0.5 * extents.x, ey = 0.5 * extents.y;
  // Counter-clockwise; the clipper treats "left of edge" as inside.
  std::array<Vec2, 4> out;
  const double sx[4] = {+1, -1, -1, +1};
  const double sy[4] = {+1, +1, -1, -1};
  for (int i = 0; i < 4; ++i) {
    const double lx = sx[i] * ex, ly = sy[i] * ey;
    out[static_cast<std::size_t>(i)] = {center.x + c * lx - s * ly,
                                        center.y + s * lx + c * ly};
  }
  return out;
}

bool OrientedBox::contains(const Vec3& p, double tol) const {
  const double dx = p.x - center.x, dy = p.y - center.y;
  const double c = std::cos(yaw), s = std::sin(yaw);
  const double lx = c * dx + s * dy;
  const double ly = c * dy - s * dx;
  return std::abs(lx) <= 0.5 * extents.x + tol &&
         std::abs(ly) <= 0.5 * extents.y + tol &&
         std::abs(p.z - center.z) <= 0.5 * extents.z + tol;
}

void CameraModel::validate() const {
  if (!(horizontal_fov > 0.0 && horizontal_fov < kPi))
    throw std::invalid_argument("CameraModel: fov must be in (0, pi)");
  if (width < 8 || height < 8)
    throw std::invalid_argument("CameraModel: ray grid must be at least 8x8");
  if (!(max_range > 0.0))
    throw std::invalid_argument("CameraModel: max_range must be positive");
}

std::vector<Vec3> CameraModel::pixel_rays() const {
  validate();
  const double tan_h = std::tan(0.5 * horizontal_fov);
  const double tan_v = tan_h * static_cast<double>(height) / static_cast<double>(width);
  std::vector<Vec3> rays;
  rays.reserve(static_cast<std::size_t>(width) * static_cast<std::size_t>(height));
  for (int v = 0; v < height; ++v) {
    const double ny = (2.0 * (static_cast<double>(v) + 0.5) / height - 1.0) * tan_v;
    for (int u = 0; u < width; ++u) {
      const double nx = (2.0 * (static_cast<double>(u) + 0.5) / width - 1.0) * tan_h;
      rays.push_back(Vec3{nx, ny, 1.0}.normalized());
    }
  }
  return rays;
}

void FactoredView::validate() const {
  const std::size_t n = depth.size();
  if (ray_x.size() != n || ray_y.size() != n || ray_z.size() != n || valid.size() != n)
    throw std::invalid_argument("FactoredView: array sizes disagree");
  if (!(metric_scale > 0.0))
    throw std::invalid_argument("FactoredView: metric scale must be positive");
  for (std::size_t i = 0; i < n; ++i) {
    if (!valid[i]) continue;
    if (!(depth[i] > 0.0))
      throw std::invalid_argument("FactoredView: non-positive depth at valid pixel");
    const double norm2 =
        ray_x[i] * ray_x[i] + ray_y[i] * ray_y[i] + ray_z[i] * ray_z[i];
    if (std::abs(std::sqrt(norm2) - 1.0) > 1e-9)
      throw std::invalid_argument("FactoredView: non-unit ray at valid pixel");
  }
}

std::vector<Vec3> compose_backprojection(const FactoredView& view) {
  view.validate();
  const std::size_t n = view.pixel_count();
  std::vector<double> rx, ry, rz, d;
  rx.reserve(n);
  ry.reserve(n);
  rz.reserve(n);
  d.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!view.valid[i]) continue;
    rx.push_back(view.ray_x[i]);
    ry.push_back(view.ray_y[i]);
    rz.push_back(view.ray_z[i]);
    d.push_back(view.depth[i]);
  }
  const std::size_t m = d.size();
  std::vector<double> ox(m), oy(m), oz(m);
  const double trans[3] = {view.relative_pose.translation.x,
                           view.relative_pose.translation.y,
                           view.relative_pose.translation.z};
  kernels::compose_points(view.relative_pose.rotation.m.data(), trans,
                          view.metric_scale, rx.data(), ry.data(), rz.data(),
                          d.data(), m, ox.data(), oy.data(), oz.data());
  std::vector<Vec3> out(m);
  for (std::size_t i = 0; i < m; ++i) out[i] = {ox[i], oy[i], oz[i]};
  return out;
}

std::vector<Vec3> lift_points(const Pose& global_pose, double metric_scale,
                              std::span<const Vec3> points_local) {
  const std::size_t n = points_local.size();
  std::vector<double> rx(n), ry(n), rz(n), d(n, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    rx[i] = points_local[i].x;
    ry[i] = points_local[i].y;
    rz[i] = points_local[i].z;
  }
  std::vector<double> ox(n), oy(n), oz(n);
  const double trans[3] = {global_pose.translation.x, global_pose.translation.y,
                           global_pose.translation.z};
  kernels::compose_points(global_pose.rotation.m.data(), trans, metric_scale,
                          rx.data(), ry.data(), rz.data(), d.data(), n, ox.data(),
                          oy.data(), oz.data());
  std::vector<Vec3> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = {ox[i], oy[i], oz[i]};
  return out;
}

std::vector<Pose> anchor_poses(const Pose& first_view_global,
                               const std::vector<Pose>& relative_poses) {
  if (relative_poses.empty())
    throw std::invalid_argument("anchor_poses: empty pose list");
  if (!relative_poses.front().is_identity(1e-9))
    throw std::invalid_argument(
        "anchor_poses: first relative pose must be the identity (batch "
        "reference convention)");
  std::vector<Pose> out;
  out.reserve(relative_poses.size());
  for (const Pose& rel : relative_poses) out.push_back(first_view_global.compose(rel));
  return out;
}

namespace {

// Andrew monotone chain; returns CCW hull without the closing point.
std::vector<Vec2> convex_hull(std::vector<Vec2> pts) {
  std::sort(pts.begin(), pts.end(), [](const Vec2& a, const Vec2& b) {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
  });
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](const Vec2& a, const Vec2& b) {
                          return a.x == b.x && a.y == b.y;
                        }),
            pts.end());
  const std::size_t n = pts.size();
  if (n <= 2) return pts;
  auto cross = [](const Vec2& o, const Vec2& a, const Vec2& b) {
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
  };
  std::vector<Vec2> hull(2 * n);
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  const std::size_t lower = k + 1;
  for (std::size_t i = n - 1; i-- > 0;) {
    while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

}  // namespace

OrientedBox fit_oriented_box(std::span<const Vec3> points) {
  if (points.empty()) throw std::invalid_argument("fit_oriented_box: no points");

  const std::size_t n = points.size();
  std::vector<double> xs(n), ys(n), zs(n);
  for (std::size_t i = 0; i < n; ++i) {
    xs[i] = points[i].x;
    ys[i] = points[i].y;
    zs[i] = points[i].z;
  }
  double lo[3], hi[3];
  kernels::minmax3(xs.data(), ys.data(), zs.data(), n, lo, hi);

  std::vector<Vec2> flat(n);
  for (std::size_t i = 0; i < n; ++i) flat[i] = {points[i].x, points[i].y};
  const std::vector<Vec2> hull = convex_hull(std::move(flat));

  double best_yaw = 0.0;
  double best_cx = 0.5 * (lo[0] + hi[0]);
  double best_cy = 0.5 * (lo[1] + hi[1]);
  double best_w = hi[0] - lo[0];
  double best_h = hi[1] - lo[1];

  if (hull.size() == 2) {
    const double ang = std::atan2(hull[1].y - hull[0].y, hull[1].x - hull[0].x);
    const double c = std::cos(ang), s = std::sin(ang);
    double umin = 1e300, umax = -1e300, vmin = 1e300, vmax = -1e300;
    for (const Vec2& p : hull) {
      const double u = c * p.x + s * p.y;
      const double v = -s * p.x + c * p.y;
      umin = std::min(umin, u);
      umax = std::max(umax, u);
      vmin = std::min(vmin, v);
      vmax = std::max(vmax, v);
    }
    best_yaw = ang;
    best_w = umax - umin;
    best_h = vmax - vmin;
    const double cu = 0.5 * (umin + umax), cv = 0.5 * (vmin + vmax);
    best_cx = c * cu - s * cv;
    best_cy = s * cu + c * cv;
  } else if (hull.size() >= 3) {
    // Rotating calipers over hull edges; the minimum-area rectangle has a side
    // collinear with some hull edge.
    double best_area = 1e300;
    for (std::size_t e = 0; e < hull.size(); ++e) {
      const Vec2& p0 = hull[e];
      const Vec2& p1 = hull[(e + 1) % hull.size()];
      const double ang = std::atan2(p1.y - p0.y, p1.x - p0.x);
      const double c = std::cos(ang), s = std::sin(ang);
      double umin = 1e300, umax = -1e300, vmin = 1e300, vmax = -1e300;
      for (const Vec2& p : hull) {
        const double u = c * p.x + s * p.y;
        const double v = -s * p.x + c * p.y;
        umin = std::min(umin, u);
        umax = std::max(umax, u);
        vmin = std::min(vmin, v);
        vmax = std::max(vmax, v);
      }
      const double area = (umax - umin) * (vmax - vmin);
      if (area < best_area) {
        best_area = area;
        best_yaw = ang;
        best_w = umax - umin;
        best_h = vmax - vmin;
        const double cu = 0.5 * (umin + umax), cv = 0.5 * (vmin + vmax);
        best_cx = c * cu - s * cv;
        best_cy = s * cu + c * cv;
      }
    }
  }

  // Canonicalize yaw into [-pi/2, pi/2); a pi/2 shift swaps footprint sides.
  double yaw = std::remainder(best_yaw, kPi);
  double w = best_w, h = best_h;
  if (yaw >= kPi / 2.0) yaw -= kPi;
  if (yaw < -kPi / 4.0 || yaw >= kPi / 4.0) {
    // Prefer the representative closest to zero; keeps symmetric inputs at yaw 0.
    const double shifted = yaw >= 0.0 ? yaw - kPi / 2.0 : yaw + kPi / 2.0;
    if (std::abs(shifted) < std::abs(yaw)) {
      yaw = shifted;
      std::swap(w, h);
    }
  }

  OrientedBox box;
  box.yaw = canonical_yaw(yaw);
  box.extents = {std::max(w, OrientedBox::kMinExtent),
                 std::max(h, OrientedBox::kMinExtent),
                 std::max(hi[2] - lo[2], OrientedBox::kMinExtent)};
  box.center = {best_cx, best_cy, 0.5 * (lo[2] + hi[2])};
  return box;
}

namespace {

double polygon_area(const std::vector<Vec2>& poly) {
  double s = 0.0;
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[(i + 1) % n];
    s += a.x * b.y - a.y * b.x;
  }
  return 0.5 * std::abs(s);
}

// Sutherland-Hodgman clip of a convex polygon against the half-plane left of
// the directed edge (e0, e1).
std::vector<Vec2> clip_halfplane(const std::vector<Vec2>& poly, const Vec2& e0,
                                 const Vec2& e1) {
  std::vector<Vec2> out;
  const std::size_t n = poly.size();
  if (n == 0) return out;
  const double ex = e1.x - e0.x, ey = e1.y - e0.y;
  auto side = [&](const Vec2& p) { return ex * (p.y - e0.y) - ey * (p.x - e0.x); };
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& cur = poly[i];
    const Vec2& nxt = poly[(i + 1) % n];
    const double sc = side(cur), sn = side(nxt);
    if (sc >= 0.0) out.push_back(cur);
    if ((sc > 0.0 && sn < 0.0) || (sc < 0.0 && sn > 0.0)) {
      const double t = sc / (sc - sn);
      out.push_back({cur.x + t * (nxt.x - cur.x), cur.y + t * (nxt.y - cur.y)});
    }
  }
  return out;
}

std::vector<Vec2> footprint_clip(const OrientedBox& a, const OrientedBox& b) {
  const auto ca = a.footprint_corners();
  const auto cb = b.footprint_corners();
  std::vector<Vec2> poly(ca.begin(), ca.end());
  for (int e = 0; e < 4 && !poly.empty(); ++e)
    poly = clip_halfplane(poly, cb[static_cast<std::size_t>(e)],
                          cb[static_cast<std::size_t>((e + 1) % 4)]);
  return poly;
}

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
  const double abx = b.x - a.x, aby = b.y - a.y;
  const double len2 = abx * abx + aby * aby;
  double t = len2 > 0.0 ? ((p.x - a.x) * abx + (p.y - a.y) * aby) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  const double dx = p.x - (a.x + t * abx), dy = p.y - (a.y + t * aby);
  return std::sqrt(dx * dx + dy * dy);
}

}  // namespace

double footprint_intersection_area(const OrientedBox& a, const OrientedBox& b) {
  return polygon_area(footprint_clip(a, b));
}

double footprint_overlap(const OrientedBox& a, const OrientedBox& b) {
  const double inter = footprint_intersection_area(a, b);
  const double min_area = std::min(a.footprint_area(), b.footprint_area());
  return std::clamp(inter / min_area, 0.0, 1.0);
}

double box_intersection_volume(const OrientedBox& a, const OrientedBox& b) {
  const double dz =
      std::min(a.zmax(), b.zmax()) - std::max(a.zmin(), b.zmin());
  if (dz <= 0.0) return 0.0;
  return footprint_intersection_area(a, b) * dz;
}

double containment_fraction(const OrientedBox& a, const OrientedBox& b) {
  return std::clamp(box_intersection_volume(a, b) / a.volume(), 0.0, 1.0);
}

double box_iou(const OrientedBox& a, const OrientedBox& b) {
  const double inter = box_intersection_volume(a, b);
  const double uni = a.volume() + b.volume() - inter;
  return std::clamp(inter / uni, 0.0, 1.0);
}

double footprint_distance(const OrientedBox& a, const OrientedBox& b) {
  if (!footprint_clip(a, b).empty()) return 0.0;
  const auto ca = a.footprint_corners();
  const auto cb = b.footprint_corners();
  double best = 1e300;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      best = std::min(best, point_segment_distance(ca[static_cast<std::size_t>(i)],
                                                   cb[static_cast<std::size_t>(j)],
                                                   cb[static_cast<std::size_t>((j + 1) % 4)]));
      best = std::min(best, point_segment_distance(cb[static_cast<std::size_t>(i)],
                                                   ca[static_cast<std::size_t>(j)],
                                                   ca[static_cast<std::size_t>((j + 1) % 4)]));
    }
  return best;
}

std::vector<Vec3> voxel_downsample(std::span<const Vec3> points, double leaf) {
  if (!(leaf > 0.0)) throw std::invalid_argument("voxel_downsample: leaf must be > 0");
  std::unordered_set<std::uint64_t> seen;
  seen.reserve(points.size());
  std::vector<Vec3> out;
  out.reserve(points.size());
  for (const Vec3& p : points) {
    const auto qx = static_cast<std::int64_t>(std::floor(p.x / leaf));
    const auto qy = static_cast<std::int64_t>(std::floor(p.y / leaf));
    const auto qz = static_cast<std::int64_t>(std::floor(p.z / leaf));
    std::uint64_t key = 14695981039346656037ull;
    for (std::int64_t q : {qx, qy, qz}) {
      key ^= static_cast<std::uint64_t>(q);
      key *= 1099511628211ull;
    }
    if (seen.insert(key).second) out.push_back(p);
  }
  return out;
}

}  // namespace asg
