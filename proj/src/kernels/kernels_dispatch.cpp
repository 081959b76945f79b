#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "asg/kernels.hpp"

namespace asg::kernels {

namespace {

bool detect_avx2() {
#if (defined(__x86_64__) || defined(_M_X64)) && defined(__GNUC__)
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

Backend initial_backend() {
  if (const char* env = std::getenv("ASG_KERNEL_BACKEND")) {
    const std::string v(env);
    if (v == "scalar") return Backend::scalar;
    if (v == "avx2" && detect_avx2()) return Backend::avx2;
  }
  return detect_avx2() ? Backend::avx2 : Backend::scalar;
}

std::atomic<Backend> g_backend{initial_backend()};

}  // namespace

const char* backend_name(Backend b) {
  return b == Backend::avx2 ? "avx2" : "scalar";
}

bool avx2_available() { return detect_avx2(); }

Backend active_backend() { return g_backend.load(std::memory_order_relaxed); }

void set_backend(Backend b) {
  if (b == Backend::avx2 && !detect_avx2())
    throw std::invalid_argument("kernels: avx2 backend not available on this CPU");
  g_backend.store(b, std::memory_order_relaxed);
}

void compose_points(const double rot[9], const double trans[3], double scale,
                    const double* ray_x, const double* ray_y, const double* ray_z,
                    const double* depth, std::size_t n, double* out_x,
                    double* out_y, double* out_z) {
#if defined(__x86_64__) || defined(_M_X64)
  if (active_backend() == Backend::avx2) {
    avx2::compose_points(rot, trans, scale, ray_x, ray_y, ray_z, depth, n, out_x,
                         out_y, out_z);
    return;
  }
#endif
  scalar::compose_points(rot, trans, scale, ray_x, ray_y, ray_z, depth, n, out_x,
                         out_y, out_z);
}

double dot(const double* a, const double* b, std::size_t n) {
#if defined(__x86_64__) || defined(_M_X64)
  if (active_backend() == Backend::avx2) return avx2::dot(a, b, n);
#endif
  return scalar::dot(a, b, n);
}

RayHit ray_first_hit(const double origin[3], const double dir[3],
                     const BoxesSoA& boxes, double t_min, double t_max) {
#if defined(__x86_64__) || defined(_M_X64)
  if (active_backend() == Backend::avx2)
    return avx2::ray_first_hit(origin, dir, boxes, t_min, t_max);
#endif
  return scalar::ray_first_hit(origin, dir, boxes, t_min, t_max);
}

void minmax3(const double* xs, const double* ys, const double* zs, std::size_t n,
             double lo[3], double hi[3]) {
#if defined(__x86_64__) || defined(_M_X64)
  if (active_backend() == Backend::avx2) {
    avx2::minmax3(xs, ys, zs, n, lo, hi);
    return;
  }
#endif
  scalar::minmax3(xs, ys, zs, n, lo, hi);
}

}  // namespace asg::kernels
