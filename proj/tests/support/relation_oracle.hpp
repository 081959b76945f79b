#pragma once

// Independent relation-predicate oracle used by the unit and acceptance
// suites. Footprint intersection areas come from origin-fan triangulation with
// signed triangle-triangle clipping, a different algorithm from the
// Sutherland-Hodgman half-plane clipping inside the library.

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "asg/prng.hpp"
#include "asg/relations.hpp"

namespace asg_test {

struct P2 {
  double x, y;
};

inline int sig(double d) {
  constexpr double eps = 1e-12;
  return (d > eps) - (d < -eps);
}

inline double cross3(const P2& o, const P2& a, const P2& b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

inline double poly_area(const std::vector<P2>& ps) {
  double r = 0;
  for (std::size_t i = 0; i < ps.size(); ++i) {
    const P2& a = ps[i];
    const P2& b = ps[(i + 1) % ps.size()];
    r += a.x * b.y - a.y * b.x;
  }
  return r / 2.0;
}

inline int line_cross(const P2& a, const P2& b, const P2& c, const P2& d, P2& p) {
  const double s1 = cross3(a, b, c);
  const double s2 = cross3(a, b, d);
  if (sig(s1) == 0 && sig(s2) == 0) return 2;
  if (sig(s2 - s1) == 0) return 0;
  p.x = (c.x * s2 - d.x * s1) / (s2 - s1);
  p.y = (c.y * s2 - d.y * s1) / (s2 - s1);
  return 1;
}

inline void polygon_cut(std::vector<P2>& p, const P2& a, const P2& b) {
  std::vector<P2> pp;
  const std::size_t n = p.size();
  for (std::size_t i = 0; i < n; ++i) {
    const P2& cur = p[i];
    const P2& nxt = p[(i + 1) % n];
    if (sig(cross3(a, b, cur)) > 0) pp.push_back(cur);
    if (sig(cross3(a, b, cur)) != sig(cross3(a, b, nxt))) {
      P2 q;
      if (line_cross(a, b, cur, nxt, q) == 1) pp.push_back(q);
    }
  }
  p.clear();
  for (const P2& q : pp) {
    if (p.empty() || sig(q.x - p.back().x) != 0 || sig(q.y - p.back().y) != 0)
      p.push_back(q);
  }
  while (p.size() > 1 && sig(p.back().x - p.front().x) == 0 &&
         sig(p.back().y - p.front().y) == 0)
    p.pop_back();
}

inline double triangle_intersect(P2 a, P2 b, P2 c, P2 d) {
  const P2 o{0, 0};
  const int s1 = sig(cross3(o, a, b));
  const int s2 = sig(cross3(o, c, d));
  if (s1 == 0 || s2 == 0) return 0.0;
  if (s1 == -1) std::swap(a, b);
  if (s2 == -1) std::swap(c, d);
  std::vector<P2> p{o, a, b};
  polygon_cut(p, o, c);
  polygon_cut(p, c, d);
  polygon_cut(p, d, o);
  double res = std::abs(poly_area(p));
  if (s1 * s2 == -1) res = -res;
  return res;
}

inline double polys_intersection_area(const std::vector<P2>& pa,
                                      const std::vector<P2>& pb) {
  double res = 0;
  for (std::size_t i = 0; i < pa.size(); ++i)
    for (std::size_t j = 0; j < pb.size(); ++j)
      res += triangle_intersect(pa[i], pa[(i + 1) % pa.size()], pb[j],
                                pb[(j + 1) % pb.size()]);
  return std::abs(res);
}

inline std::vector<P2> oracle_corners(const asg::OrientedBox& b) {
  const double c = std::cos(b.yaw), s = std::sin(b.yaw);
  const double hx = b.extents.x / 2, hy = b.extents.y / 2;
  std::vector<P2> out;
  for (const auto& [lx, ly] :
       {std::pair<double, double>{hx, hy}, {-hx, hy}, {-hx, -hy}, {hx, -hy}})
    out.push_back({b.center.x + c * lx - s * ly, b.center.y + s * lx + c * ly});
  return out;
}

inline double oracle_footprint_area(const asg::OrientedBox& a, const asg::OrientedBox& b) {
  return polys_intersection_area(oracle_corners(a), oracle_corners(b));
}

inline double seg_dist(const P2& p, const P2& a, const P2& b) {
  const double abx = b.x - a.x, aby = b.y - a.y;
  const double len2 = abx * abx + aby * aby;
  double t = len2 > 0 ? ((p.x - a.x) * abx + (p.y - a.y) * aby) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return std::hypot(p.x - (a.x + t * abx), p.y - (a.y + t * aby));
}

inline double oracle_rect_distance(const asg::OrientedBox& a, const asg::OrientedBox& b) {
  // The signed triangle sum leaves ~1e-13 residue on disjoint polygons.
  if (oracle_footprint_area(a, b) > 1e-9) return 0.0;
  const auto pa = oracle_corners(a), pb = oracle_corners(b);
  double best = 1e300;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      best = std::min(best, seg_dist(pa[static_cast<std::size_t>(i)],
                                     pb[static_cast<std::size_t>(j)],
                                     pb[static_cast<std::size_t>((j + 1) % 4)]));
      best = std::min(best, seg_dist(pb[static_cast<std::size_t>(i)],
                                     pa[static_cast<std::size_t>(j)],
                                     pa[static_cast<std::size_t>((j + 1) % 4)]));
    }
  return best;
}

// Literal transcription of the fixed-priority rule list.
inline std::optional<asg::RelationPredicate> oracle_evaluate(
    const asg::OrientedBox& A, const asg::OrientedBox& B,
    const asg::RelationThresholds& th) {
  using asg::RelationPredicate;
  auto zmin = [](const asg::OrientedBox& b) { return b.center.z - b.extents.z / 2; };
  auto zmax = [](const asg::OrientedBox& b) { return b.center.z + b.extents.z / 2; };
  auto overlap_ratio = [&](const asg::OrientedBox& x, const asg::OrientedBox& y) {
    return oracle_footprint_area(x, y) /
           std::min(x.extents.x * x.extents.y, y.extents.x * y.extents.y);
  };
  auto containment = [&](const asg::OrientedBox& x, const asg::OrientedBox& y) {
    const double dz = std::min(zmax(x), zmax(y)) - std::max(zmin(x), zmin(y));
    if (dz <= 0) return 0.0;
    return oracle_footprint_area(x, y) * dz / (x.extents.x * x.extents.y * x.extents.z);
  };

  {
    const double gap = zmin(A) - zmax(B);
    if (gap >= -th.contact_gap && gap <= th.contact_gap &&
        overlap_ratio(A, B) >= th.min_footprint_overlap &&
        containment(A, B) <= th.on_top_containment_cap)
      return RelationPredicate::on_top_of;
  }
  {
    const double gap = zmin(B) - zmax(A);
    if (gap >= -th.contact_gap && gap <= th.contact_gap &&
        overlap_ratio(B, A) >= th.min_footprint_overlap &&
        containment(B, A) <= th.on_top_containment_cap)
      return RelationPredicate::supports;
  }
  if (zmax(A) < zmin(B)) {
    const double gap = zmin(B) - zmax(A);
    if (gap > th.contact_gap && gap <= th.max_vertical_gap &&
        overlap_ratio(A, B) >= th.min_footprint_overlap)
      return RelationPredicate::under;
  }
  if (zmax(B) < zmin(A)) {
    const double gap = zmin(A) - zmax(B);
    if (gap > th.contact_gap && gap <= th.max_vertical_gap &&
        overlap_ratio(B, A) >= th.min_footprint_overlap)
      return RelationPredicate::over;
  }
  if (containment(A, B) >= th.inside_fraction &&
      A.extents.x * A.extents.y * A.extents.z <= B.extents.x * B.extents.y * B.extents.z)
    return RelationPredicate::inside;
  {
    const double vert = std::min(zmax(A), zmax(B)) - std::max(zmin(A), zmin(B));
    if (oracle_rect_distance(A, B) <= th.near_distance &&
        vert / std::min(A.extents.z, B.extents.z) >= th.min_height_interval_overlap)
      return RelationPredicate::next_to;
  }
  return std::nullopt;
}

// Random 10-node scenes with stacked, contained and free boxes so every
// predicate fires somewhere.
inline asg::SceneGraph random_relation_scene(asg::Rng& rng) {
  using asg::OrientedBox;
  constexpr double kPi = 3.14159265358979323846;
  asg::SceneGraph g;
  std::vector<OrientedBox> bases;
  auto add = [&](const OrientedBox& box) {
    asg::ObjectNode n;
    n.label_votes = {{"box", 1}};
    n.detection_count = 1;
    n.points = {box.center};
    n.box = box;
    g.add_node(n);
  };
  for (int i = 0; i < 4; ++i) {
    OrientedBox b;
    b.extents = {rng.uniform(0.4, 1.4), rng.uniform(0.4, 1.2), rng.uniform(0.3, 1.0)};
    b.yaw = asg::canonical_yaw(rng.uniform(-kPi / 2, kPi / 2));
    b.center = {rng.uniform(0, 6), rng.uniform(0, 6), b.extents.z / 2};
    bases.push_back(b);
    add(b);
  }
  for (int i = 0; i < 3; ++i) {
    const OrientedBox& base = bases[static_cast<std::size_t>(rng.uniform_int(0, 3))];
    OrientedBox t;
    t.extents = {rng.uniform(0.1, 0.5), rng.uniform(0.1, 0.4), rng.uniform(0.1, 0.4)};
    t.yaw = base.yaw;
    t.center = {base.center.x + rng.uniform(-0.2, 0.2),
                base.center.y + rng.uniform(-0.2, 0.2),
                base.center.z + base.extents.z / 2 + t.extents.z / 2 +
                    rng.uniform(-0.02, 0.3)};
    add(t);
  }
  OrientedBox outer;
  outer.extents = {1.0, 0.8, 1.0};
  outer.yaw = asg::canonical_yaw(rng.uniform(-kPi / 2, kPi / 2));
  outer.center = {rng.uniform(0, 6), rng.uniform(0, 6), 0.5};
  add(outer);
  OrientedBox inner;
  inner.extents = {0.3, 0.25, 0.2};
  inner.yaw = outer.yaw;
  inner.center = {outer.center.x + rng.uniform(-0.1, 0.1),
                  outer.center.y + rng.uniform(-0.1, 0.1), rng.uniform(0.2, 0.6)};
  add(inner);
  for (int i = 0; i < 2; ++i) {
    OrientedBox b;
    b.extents = {rng.uniform(0.2, 0.8), rng.uniform(0.2, 0.8), rng.uniform(0.2, 1.2)};
    b.yaw = asg::canonical_yaw(rng.uniform(-kPi / 2, kPi / 2));
    b.center = {rng.uniform(0, 6), rng.uniform(0, 6), b.extents.z / 2};
    add(b);
  }
  return g;
}

}  // namespace asg_test
