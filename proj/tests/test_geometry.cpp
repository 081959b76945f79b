#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "asg/geometry.hpp"
#include "asg/prng.hpp"

using namespace asg;

namespace {

constexpr double kPi = 3.14159265358979323846;

OrientedBox make_box(double cx, double cy, double cz, double yaw, double ex, double ey,
                     double ez) {
  OrientedBox b;
  b.center = {cx, cy, cz};
  b.yaw = yaw;
  b.extents = {ex, ey, ez};
  return b;
}

Pose random_pose(Rng& rng) {
  return make_camera_pose({rng.uniform(-3, 3), rng.uniform(-3, 3), rng.uniform(-3, 3)},
                          rng.uniform(0, 2 * kPi), rng.uniform(-0.8, 0.8));
}

// Monte-Carlo overlap oracle over a bounding volume of both boxes.
void mc_overlap(Rng& rng, const OrientedBox& a, const OrientedBox& b, int n,
                double& inter_volume, double& inter_area_2d) {
  const double r = 3.0;
  const Vec3 lo{std::min(a.center.x, b.center.x) - r, std::min(a.center.y, b.center.y) - r,
                std::min(a.zmin(), b.zmin()) - 0.5};
  const Vec3 hi{std::max(a.center.x, b.center.x) + r, std::max(a.center.y, b.center.y) + r,
                std::max(a.zmax(), b.zmax()) + 0.5};
  const double vol = (hi.x - lo.x) * (hi.y - lo.y) * (hi.z - lo.z);
  const double area = (hi.x - lo.x) * (hi.y - lo.y);
  int in3 = 0, in2 = 0;
  OrientedBox fa = a, fb = b;
  fa.center.z = 0.0;
  fa.extents.z = 1.0;
  fb.center.z = 0.0;
  fb.extents.z = 1.0;
  for (int i = 0; i < n; ++i) {
    const Vec3 p{rng.uniform(lo.x, hi.x), rng.uniform(lo.y, hi.y), rng.uniform(lo.z, hi.z)};
    if (a.contains(p) && b.contains(p)) ++in3;
    const Vec3 q{rng.uniform(lo.x, hi.x), rng.uniform(lo.y, hi.y), 0.0};
    if (fa.contains(q) && fb.contains(q)) ++in2;
  }
  inter_volume = vol * in3 / n;
  inter_area_2d = area * in2 / n;
}

}  // namespace

TEST_SUITE_BEGIN("geometry");

TEST_CASE("pose and rotation basics") {
  const Mat3 r = Mat3::rot_z(kPi / 2);
  const Vec3 v = r.apply({1, 0, 0});
  CHECK(v.x == doctest::Approx(0.0));
  CHECK(v.y == doctest::Approx(1.0));
  CHECK(r.is_orthonormal());

  Rng rng(5);
  for (int i = 0; i < 20; ++i) {
    const Pose p = random_pose(rng);
    CHECK(p.rotation.is_orthonormal(1e-9));
    const Pose round = p.compose(p.inverse());
    CHECK(round.is_identity(1e-9));
  }
}

TEST_CASE("camera pose convention: z forward, x right, y down") {
  const Pose p = make_camera_pose({0, 0, 1}, 0.0, 0.0);
  const Vec3 fwd = p.rotation.apply({0, 0, 1});
  const Vec3 right = p.rotation.apply({1, 0, 0});
  const Vec3 down = p.rotation.apply({0, 1, 0});
  CHECK(fwd.x == doctest::Approx(1.0));
  CHECK(right.y == doctest::Approx(-1.0));
  CHECK(down.z == doctest::Approx(-1.0));

  // 45 degrees pitched down: forward gains a -z component.
  const Pose tilted = make_camera_pose({0, 0, 1}, 0.0, kPi / 4);
  CHECK(tilted.rotation.apply(Vec3{0, 0, 1}).z == doctest::Approx(-std::sin(kPi / 4)));
}

TEST_CASE("compose_backprojection trivial examples") {
  FactoredView v;
  v.ray_x = {0.0};
  v.ray_y = {0.0};
  v.ray_z = {1.0};
  v.depth = {2.0};
  v.valid = {1};
  v.metric_scale = 1.5;
  v.relative_pose = Pose::identity();
  auto pts = compose_backprojection(v);
  REQUIRE(pts.size() == 1);
  CHECK(pts[0].x == doctest::Approx(0.0));
  CHECK(pts[0].y == doctest::Approx(0.0));
  CHECK(pts[0].z == doctest::Approx(3.0));

  v.metric_scale = 1.0;
  v.relative_pose.translation = {1, 0, 0};
  pts = compose_backprojection(v);
  CHECK(pts[0].x == doctest::Approx(1.0));
  CHECK(pts[0].z == doctest::Approx(2.0));
}

TEST_CASE("compose_backprojection validates invariants") {
  FactoredView v;
  v.ray_x = {0.0};
  v.ray_y = {0.0};
  v.ray_z = {2.0};  // not unit
  v.depth = {1.0};
  v.valid = {1};
  CHECK_THROWS_AS(compose_backprojection(v), std::invalid_argument);
  v.ray_z = {1.0};
  v.depth = {-1.0};
  CHECK_THROWS_AS(compose_backprojection(v), std::invalid_argument);
  v.depth = {0.5};
  v.metric_scale = 0.0;
  CHECK_THROWS_AS(compose_backprojection(v), std::invalid_argument);
  // Invalid pixels are exempt from the ray/depth checks and skipped.
  v.metric_scale = 1.0;
  v.valid = {0};
  CHECK(compose_backprojection(v).empty());
}

TEST_CASE("factored round trip: scale factored out and recomposed") {
  Rng rng(21);
  for (int it = 0; it < 100; ++it) {
    const Pose pose = random_pose(rng);
    const double scale = rng.uniform(0.3, 3.0);
    const std::size_t n = 200;
    FactoredView v;
    v.relative_pose = pose;
    v.metric_scale = scale;
    std::vector<Vec3> truth(n);
    for (std::size_t i = 0; i < n; ++i) {
      Vec3 ray{rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5), 1.0};
      ray = ray.normalized();
      const double metric_depth = rng.uniform(0.5, 6.0);
      v.ray_x.push_back(ray.x);
      v.ray_y.push_back(ray.y);
      v.ray_z.push_back(ray.z);
      v.depth.push_back(metric_depth / scale);  // up-to-scale depth
      v.valid.push_back(1);
      truth[i] = pose.apply(ray * metric_depth);
    }
    const std::vector<Vec3> got = compose_backprojection(v);
    REQUIRE(got.size() == n);
    for (std::size_t i = 0; i < n; ++i) CHECK((got[i] - truth[i]).norm() < 1e-9);
  }
}

TEST_CASE("compose_backprojection is linear in metric scale") {
  Rng rng(22);
  FactoredView v;
  v.relative_pose = Pose::identity();
  v.metric_scale = 1.0;
  for (int i = 0; i < 64; ++i) {
    Vec3 ray{rng.uniform(-0.4, 0.4), rng.uniform(-0.4, 0.4), 1.0};
    ray = ray.normalized();
    v.ray_x.push_back(ray.x);
    v.ray_y.push_back(ray.y);
    v.ray_z.push_back(ray.z);
    v.depth.push_back(rng.uniform(0.5, 4.0));
    v.valid.push_back(1);
  }
  const auto base = compose_backprojection(v);
  v.metric_scale = 2.5;
  const auto scaled = compose_backprojection(v);
  for (std::size_t i = 0; i < base.size(); ++i)
    CHECK(scaled[i].norm() == doctest::Approx(2.5 * base[i].norm()).epsilon(1e-12));
}

TEST_CASE("anchor_poses") {
  Rng rng(23);
  std::vector<Pose> rels{Pose::identity()};
  for (int i = 0; i < 5; ++i) rels.push_back(random_pose(rng));

  SUBCASE("identity anchor returns the relatives") {
    const auto out = anchor_poses(Pose::identity(), rels);
    for (std::size_t i = 0; i < rels.size(); ++i)
      CHECK((out[i].translation - rels[i].translation).norm() < 1e-12);
  }
  SUBCASE("translation anchor") {
    Pose anchor = Pose::identity();
    anchor.translation = {0, 0, 1};
    const auto out = anchor_poses(anchor, {Pose::identity()});
    CHECK(out[0].translation.z == doctest::Approx(1.0));
  }
  SUBCASE("algebraic round trip") {
    const Pose anchor = random_pose(rng);
    const auto out = anchor_poses(anchor, rels);
    CHECK((out[0].translation - anchor.translation).norm() < 1e-12);
    for (std::size_t i = 0; i < rels.size(); ++i) {
      const Pose rec = anchor.inverse().compose(out[i]);
      CHECK((rec.translation - rels[i].translation).norm() < 1e-9);
      for (int k = 0; k < 9; ++k)
        CHECK(rec.rotation.m[static_cast<std::size_t>(k)] ==
              doctest::Approx(rels[i].rotation.m[static_cast<std::size_t>(k)])
                  .epsilon(1e-9));
    }
  }
  SUBCASE("non-identity first pose is rejected") {
    std::vector<Pose> bad{random_pose(rng)};
    CHECK_THROWS_AS(anchor_poses(Pose::identity(), bad), std::invalid_argument);
    CHECK_THROWS_AS(anchor_poses(Pose::identity(), {}), std::invalid_argument);
  }
}

TEST_CASE("fit_oriented_box on cube corners") {
  std::vector<Vec3> corners;
  for (int sx : {-1, 1})
    for (int sy : {-1, 1})
      for (int sz : {-1, 1})
        corners.push_back({0.5 * sx + 2.0, 0.5 * sy - 1.0, 0.5 * sz + 0.5});

  const OrientedBox box = fit_oriented_box(corners);
  CHECK(box.center.x == doctest::Approx(2.0));
  CHECK(box.center.y == doctest::Approx(-1.0));
  CHECK(box.center.z == doctest::Approx(0.5));
  CHECK(box.yaw == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(box.extents.x == doctest::Approx(1.0));
  CHECK(box.extents.y == doctest::Approx(1.0));
  CHECK(box.extents.z == doctest::Approx(1.0));
}

TEST_CASE("fit_oriented_box on rotated cube recovers the yaw") {
  const double yaw = 30.0 * kPi / 180.0;
  const Mat3 r = Mat3::rot_z(yaw);
  std::vector<Vec3> corners;
  for (int sx : {-1, 1})
    for (int sy : {-1, 1})
      for (int sz : {-1, 1})
        corners.push_back(r.apply({0.5 * sx, 0.5 * sy, 0.5 * sz}));

  const OrientedBox box = fit_oriented_box(corners);
  CHECK(box.extents.x == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(box.extents.y == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(box.extents.z == doctest::Approx(1.0).epsilon(1e-9));
  // Square footprint: any multiple of 90 degrees from 30 is equivalent.
  const double delta = std::abs(std::remainder(box.yaw - yaw, kPi / 2.0));
  CHECK(delta < 1e-9);

  // Brute-force yaw sweep at 0.1 degree steps cannot find a smaller footprint.
  double best_area = 1e300;
  for (double a = -kPi / 2; a < kPi / 2; a += 0.1 * kPi / 180.0) {
    const double c = std::cos(a), s = std::sin(a);
    double umin = 1e300, umax = -1e300, vmin = 1e300, vmax = -1e300;
    for (const Vec3& p : corners) {
      const double u = c * p.x + s * p.y;
      const double v = -s * p.x + c * p.y;
      umin = std::min(umin, u);
      umax = std::max(umax, u);
      vmin = std::min(vmin, v);
      vmax = std::max(vmax, v);
    }
    best_area = std::min(best_area, (umax - umin) * (vmax - vmin));
  }
  CHECK(box.extents.x * box.extents.y <= best_area + 1e-9);
}

TEST_CASE("fit_oriented_box degenerate inputs clamp") {
  const OrientedBox single = fit_oriented_box(std::vector<Vec3>{{1, 2, 3}});
  CHECK(single.extents.x == doctest::Approx(0.01));
  CHECK(single.extents.y == doctest::Approx(0.01));
  CHECK(single.extents.z == doctest::Approx(0.01));
  CHECK(single.center.x == doctest::Approx(1.0));
  CHECK_THROWS_AS(fit_oriented_box(std::vector<Vec3>{}), std::invalid_argument);

  // Two points: box aligned with the segment.
  const OrientedBox seg = fit_oriented_box(std::vector<Vec3>{{0, 0, 0}, {1, 1, 0}});
  CHECK(seg.extents.x == doctest::Approx(std::sqrt(2.0)).epsilon(1e-9));
  CHECK(std::abs(seg.yaw) == doctest::Approx(kPi / 4).epsilon(1e-9));
}

TEST_CASE("fit_oriented_box properties on random clouds") {
  Rng rng(31);
  for (int it = 0; it < 60; ++it) {
    const int n = static_cast<int>(rng.uniform_int(3, 80));
    std::vector<Vec3> pts;
    for (int i = 0; i < n; ++i)
      pts.push_back({rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(0, 1)});
    const OrientedBox box = fit_oriented_box(pts);
    CHECK(box.yaw >= -kPi / 2);
    CHECK(box.yaw < kPi / 2);
    for (const Vec3& p : pts) CHECK(box.contains(p, 1e-7));

    // Minimality against the axis-aligned candidate.
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (const Vec3& p : pts) {
      xmin = std::min(xmin, p.x);
      xmax = std::max(xmax, p.x);
      ymin = std::min(ymin, p.y);
      ymax = std::max(ymax, p.y);
    }
    const double aabb_area = std::max(xmax - xmin, OrientedBox::kMinExtent) *
                             std::max(ymax - ymin, OrientedBox::kMinExtent);
    CHECK(box.footprint_area() <= aabb_area + 1e-9);
  }
}

TEST_CASE("footprint_overlap examples") {
  const OrientedBox a = make_box(0, 0, 0.5, 0, 1, 1, 1);
  CHECK(footprint_overlap(a, a) == doctest::Approx(1.0).epsilon(1e-9));

  const OrientedBox far = make_box(10, 0, 0.5, 0, 1, 1, 1);
  CHECK(footprint_overlap(a, far) == doctest::Approx(0.0));

  const OrientedBox shifted = make_box(0.5, 0, 0.5, 0, 1, 1, 1);
  CHECK(footprint_overlap(a, shifted) == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("box_iou examples") {
  const OrientedBox a = make_box(0, 0, 0.5, 0, 1, 1, 1);
  CHECK(box_iou(a, a) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(box_iou(a, make_box(5, 5, 0.5, 0, 1, 1, 1)) == doctest::Approx(0.0));
  // Unit cubes offset by 0.5 in x: intersection 0.5, union 1.5.
  CHECK(box_iou(a, make_box(0.5, 0, 0.5, 0, 1, 1, 1)) ==
        doctest::Approx(1.0 / 3.0).epsilon(1e-9));
}

TEST_CASE("overlap measures agree with a Monte-Carlo oracle") {
  Rng rng(33);
  for (int it = 0; it < 10; ++it) {
    const OrientedBox a = make_box(rng.uniform(-1, 1), rng.uniform(-1, 1),
                                   rng.uniform(0.2, 1.0), rng.uniform(-1.5, 1.5),
                                   rng.uniform(0.3, 2.0), rng.uniform(0.3, 2.0),
                                   rng.uniform(0.3, 1.5));
    const OrientedBox b = make_box(rng.uniform(-1, 1), rng.uniform(-1, 1),
                                   rng.uniform(0.2, 1.0), rng.uniform(-1.5, 1.5),
                                   rng.uniform(0.3, 2.0), rng.uniform(0.3, 2.0),
                                   rng.uniform(0.3, 1.5));
    double mc_vol, mc_area;
    mc_overlap(rng, a, b, 200000, mc_vol, mc_area);
    CHECK(box_intersection_volume(a, b) == doctest::Approx(mc_vol).epsilon(0.15));
    CHECK(footprint_intersection_area(a, b) == doctest::Approx(mc_area).epsilon(0.15));

    // Symmetry and range.
    CHECK(box_iou(a, b) == doctest::Approx(box_iou(b, a)).epsilon(1e-12));
    CHECK(footprint_overlap(a, b) ==
          doctest::Approx(footprint_overlap(b, a)).epsilon(1e-12));
    CHECK(box_iou(a, b) >= 0.0);
    CHECK(box_iou(a, b) <= 1.0);
  }
}

TEST_CASE("footprint_distance") {
  const OrientedBox a = make_box(0, 0, 0.5, 0, 1, 1, 1);
  CHECK(footprint_distance(a, make_box(0.5, 0, 0.5, 0, 1, 1, 1)) == doctest::Approx(0.0));
  CHECK(footprint_distance(a, make_box(2.0, 0, 0.5, 0, 1, 1, 1)) ==
        doctest::Approx(1.0).epsilon(1e-9));
  // Diagonal separation: corner-to-corner distance.
  CHECK(footprint_distance(a, make_box(2, 2, 0.5, 0, 1, 1, 1)) ==
        doctest::Approx(std::sqrt(2.0)).epsilon(1e-9));
}

TEST_CASE("containment fraction") {
  const OrientedBox outer = make_box(0, 0, 0.5, 0.3, 2, 2, 1);
  const OrientedBox inner = make_box(0, 0, 0.5, 0.3, 0.5, 0.5, 0.5);
  CHECK(containment_fraction(inner, outer) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(containment_fraction(outer, inner) ==
        doctest::Approx(inner.volume() / outer.volume()).epsilon(1e-9));
}

TEST_CASE("voxel_downsample keeps one point per leaf") {
  std::vector<Vec3> pts = {{0.01, 0.01, 0.01}, {0.02, 0.02, 0.02}, {0.11, 0.01, 0.01}};
  const auto down = voxel_downsample(pts, 0.05);
  CHECK(down.size() == 2);
  CHECK(down[0].x == doctest::Approx(0.01));
  CHECK_THROWS_AS(voxel_downsample(pts, 0.0), std::invalid_argument);
}

TEST_CASE("canonical_yaw stays in range") {
  Rng rng(35);
  for (int i = 0; i < 200; ++i) {
    const double y = canonical_yaw(rng.uniform(-10, 10));
    CHECK(y >= -kPi / 2);
    CHECK(y < kPi / 2);
  }
  CHECK(canonical_yaw(kPi / 2) == doctest::Approx(-kPi / 2));
  CHECK(canonical_yaw(kPi) == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_SUITE_END();
