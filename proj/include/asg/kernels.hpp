#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace asg::kernels {

// Data-parallel inner loops used by the geometry and simulator modules.
// Every kernel has a scalar reference implementation and, on x86-64, an AVX2
// variant. Both follow the same floating-point operation order, so results are
// bit-identical across backends; run-to-run determinism does not depend on
// which backend the dispatcher picks. tests/test_kernels.cpp enforces this.

enum class Backend { scalar, avx2 };

const char* backend_name(Backend b);
bool avx2_available();
Backend active_backend();
// Throws std::invalid_argument if the backend is not available on this CPU.
void set_backend(Backend b);

// Yaw-rotated boxes in struct-of-arrays layout for batched ray tests.
struct BoxesSoA {
  std::vector<double> cx, cy, cz;        // centers
  std::vector<double> cos_yaw, sin_yaw;  // footprint rotation
  std::vector<double> hx, hy, hz;        // half extents

  std::size_t size() const { return cx.size(); }
  void clear();
  void push(double center_x, double center_y, double center_z, double yaw,
            double half_x, double half_y, double half_z);
};

struct RayHit {
  double t = -1.0;        // distance along the (unit) ray, < 0 on miss
  std::int32_t index = -1;
};

// out[i] = R * (scale * depth[i] * ray[i]) + t, struct-of-arrays in/out.
void compose_points(const double rot[9], const double trans[3], double scale,
                    const double* ray_x, const double* ray_y, const double* ray_z,
                    const double* depth, std::size_t n, double* out_x,
                    double* out_y, double* out_z);

// Blocked dot product (see kernels_detail.hpp for the normative summation order).
double dot(const double* a, const double* b, std::size_t n);

// Nearest box entered by the ray with hit parameter in (t_min, t_max].
// Rays starting inside a box do not hit it. Ties pick the lowest index.
RayHit ray_first_hit(const double origin[3], const double dir[3],
                     const BoxesSoA& boxes, double t_min, double t_max);

// Componentwise min/max over a point set; n must be >= 1.
void minmax3(const double* xs, const double* ys, const double* zs, std::size_t n,
             double lo[3], double hi[3]);

namespace scalar {
void compose_points(const double rot[9], const double trans[3], double scale,
                    const double* ray_x, const double* ray_y, const double* ray_z,
                    const double* depth, std::size_t n, double* out_x,
                    double* out_y, double* out_z);
double dot(const double* a, const double* b, std::size_t n);
RayHit ray_first_hit(const double origin[3], const double dir[3],
                     const BoxesSoA& boxes, double t_min, double t_max);
void minmax3(const double* xs, const double* ys, const double* zs, std::size_t n,
             double lo[3], double hi[3]);
}  // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
namespace avx2 {
void compose_points(const double rot[9], const double trans[3], double scale,
                    const double* ray_x, const double* ray_y, const double* ray_z,
                    const double* depth, std::size_t n, double* out_x,
                    double* out_y, double* out_z);
double dot(const double* a, const double* b, std::size_t n);
RayHit ray_first_hit(const double origin[3], const double dir[3],
                     const BoxesSoA& boxes, double t_min, double t_max);
void minmax3(const double* xs, const double* ys, const double* zs, std::size_t n,
             double lo[3], double hi[3]);
}  // namespace avx2
#endif

}  // namespace asg::kernels
