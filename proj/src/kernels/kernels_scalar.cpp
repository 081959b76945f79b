#include <stdexcept>

#include "kernels_detail.hpp"

namespace asg::kernels {

void BoxesSoA::clear() {
  cx.clear();
  cy.clear();
  cz.clear();
  cos_yaw.clear();
  sin_yaw.clear();
  hx.clear();
  hy.clear();
  hz.clear();
}

void BoxesSoA::push(double center_x, double center_y, double center_z, double yaw,
                    double half_x, double half_y, double half_z) {
  cx.push_back(center_x);
  cy.push_back(center_y);
  cz.push_back(center_z);
  cos_yaw.push_back(std::cos(yaw));
  sin_yaw.push_back(std::sin(yaw));
  hx.push_back(half_x);
  hy.push_back(half_y);
  hz.push_back(half_z);
}

namespace scalar {

void compose_points(const double rot[9], const double trans[3], double scale,
                    const double* ray_x, const double* ray_y, const double* ray_z,
                    const double* depth, std::size_t n, double* out_x,
                    double* out_y, double* out_z) {
  for (std::size_t i = 0; i < n; ++i) {
    detail::compose_one(rot, trans, scale, ray_x[i], ray_y[i], ray_z[i], depth[i],
                        out_x[i], out_y[i], out_z[i]);
  }
}

double dot(const double* a, const double* b, std::size_t n) {
  return detail::dot_blocked(a, b, n);
}

RayHit ray_first_hit(const double origin[3], const double dir[3],
                     const BoxesSoA& boxes, double t_min, double t_max) {
  RayHit best;
  double bound = t_max;
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    const double t = detail::slab_test_one(origin, dir, boxes, i, t_min, bound);
    // Strict < keeps the lowest index on coplanar-face ties.
    if (t >= 0.0 && (best.index < 0 || t < best.t)) {
      bound = t;
      best.t = t;
      best.index = static_cast<std::int32_t>(i);
    }
  }
  return best;
}

void minmax3(const double* xs, const double* ys, const double* zs, std::size_t n,
             double lo[3], double hi[3]) {
  if (n == 0) throw std::invalid_argument("minmax3: empty point set");
  lo[0] = hi[0] = xs[0];
  lo[1] = hi[1] = ys[0];
  lo[2] = hi[2] = zs[0];
  for (std::size_t i = 1; i < n; ++i) {
    lo[0] = detail::min_pd(xs[i], lo[0]);
    hi[0] = detail::max_pd(xs[i], hi[0]);
    lo[1] = detail::min_pd(ys[i], lo[1]);
    hi[1] = detail::max_pd(ys[i], hi[1]);
    lo[2] = detail::min_pd(zs[i], lo[2]);
    hi[2] = detail::max_pd(zs[i], hi[2]);
  }
}

}  // namespace scalar
}  // namespace asg::kernels
