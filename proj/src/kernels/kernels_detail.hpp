#pragma once

#include <cmath>
#include <cstddef>

#include "asg/kernels.hpp"

// Shared per-element helpers. Both backends call these for scalar tails, and
// the vector bodies mirror the exact operation order, which is what makes the
// backends bit-identical. Compiled with -ffp-contract=off so the compiler
// cannot fuse a*b+c differently on one side.

namespace asg::kernels::detail {

// Semantics of MINPD/MAXPD: second operand wins on equality or NaN.
inline double min_pd(double a, double b) { return a < b ? a : b; }
inline double max_pd(double a, double b) { return a > b ? a : b; }

inline void compose_one(const double rot[9], const double trans[3], double scale,
                        double rx, double ry, double rz, double depth,
                        double& ox, double& oy, double& oz) {
  const double s = scale * depth;
  const double px = rx * s;
  const double py = ry * s;
  const double pz = rz * s;
  ox = ((rot[0] * px + rot[1] * py) + rot[2] * pz) + trans[0];
  oy = ((rot[3] * px + rot[4] * py) + rot[5] * pz) + trans[1];
  oz = ((rot[6] * px + rot[7] * py) + rot[8] * pz) + trans[2];
}

// Keeps slab divisions finite; preserves the sign so interval order survives.
inline double clamp_div(double d) {
  constexpr double kTiny = 1e-300;
  if (d > kTiny || d < -kTiny) return d;
  return std::signbit(d) ? -kTiny : kTiny;
}

// Slab test against one yaw-rotated box. Returns the entry parameter, or a
// negative value on miss / ray-starts-inside.
inline double slab_test_one(const double origin[3], const double dir[3],
                            const BoxesSoA& b, std::size_t i, double t_min,
                            double t_max) {
  const double dx = origin[0] - b.cx[i];
  const double dy = origin[1] - b.cy[i];
  const double dz = origin[2] - b.cz[i];
  const double c = b.cos_yaw[i];
  const double s = b.sin_yaw[i];
  // Rotate into the box frame (by -yaw).
  const double lx = c * dx + s * dy;
  const double ly = c * dy - s * dx;
  const double ldx = c * dir[0] + s * dir[1];
  const double ldy = c * dir[1] - s * dir[0];

  const double ix = 1.0 / clamp_div(ldx);
  const double iy = 1.0 / clamp_div(ldy);
  const double iz = 1.0 / clamp_div(dir[2]);

  const double tx1 = (-b.hx[i] - lx) * ix;
  const double tx2 = (b.hx[i] - lx) * ix;
  const double ty1 = (-b.hy[i] - ly) * iy;
  const double ty2 = (b.hy[i] - ly) * iy;
  const double tz1 = (-b.hz[i] - dz) * iz;
  const double tz2 = (b.hz[i] - dz) * iz;

  const double tnear =
      max_pd(max_pd(min_pd(tx1, tx2), min_pd(ty1, ty2)), min_pd(tz1, tz2));
  const double tfar =
      min_pd(min_pd(max_pd(tx1, tx2), max_pd(ty1, ty2)), max_pd(tz1, tz2));

  if (tnear <= tfar && tnear > t_min && tnear <= t_max) return tnear;
  return -1.0;
}

// Normative dot-product order: four parallel accumulators over blocks of 4,
// reduced as (acc0+acc2)+(acc1+acc3), then the sequential tail.
inline double dot_blocked(const double* a, const double* b, std::size_t n) {
  double acc0 = 0.0, acc1 = 0.0, acc2 = 0.0, acc3 = 0.0;
  const std::size_t n4 = n - n % 4;
  for (std::size_t i = 0; i < n4; i += 4) {
    acc0 += a[i] * b[i];
    acc1 += a[i + 1] * b[i + 1];
    acc2 += a[i + 2] * b[i + 2];
    acc3 += a[i + 3] * b[i + 3];
  }
  double sum = (acc0 + acc2) + (acc1 + acc3);
  for (std::size_t i = n4; i < n; ++i) sum += a[i] * b[i];
  return sum;
}

}  // namespace asg::kernels::detail
