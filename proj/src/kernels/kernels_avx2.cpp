#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <stdexcept>

#include "kernels_detail.hpp"

// AVX2 variants. Per-lane operation order matches the scalar reference exactly
// (mul/add, no FMA), so every lane reproduces the scalar result bit for bit.

namespace asg::kernels::avx2 {

void compose_points(const double rot[9], const double trans[3], double scale,
                    const double* ray_x, const double* ray_y, const double* ray_z,
                    const double* depth, std::size_t n, double* out_x,
                    double* out_y, double* out_z) {
  const __m256d vs = _mm256_set1_pd(scale);
  const __m256d r0 = _mm256_set1_pd(rot[0]), r1 = _mm256_set1_pd(rot[1]),
                r2 = _mm256_set1_pd(rot[2]), r3 = _mm256_set1_pd(rot[3]),
                r4 = _mm256_set1_pd(rot[4]), r5 = _mm256_set1_pd(rot[5]),
                r6 = _mm256_set1_pd(rot[6]), r7 = _mm256_set1_pd(rot[7]),
                r8 = _mm256_set1_pd(rot[8]);
  const __m256d t0 = _mm256_set1_pd(trans[0]), t1 = _mm256_set1_pd(trans[1]),
                t2 = _mm256_set1_pd(trans[2]);

  const std::size_t n4 = n - n % 4;
  for (std::size_t i = 0; i < n4; i += 4) {
    const __m256d s = _mm256_mul_pd(vs, _mm256_loadu_pd(depth + i));
    const __m256d px = _mm256_mul_pd(_mm256_loadu_pd(ray_x + i), s);
    const __m256d py = _mm256_mul_pd(_mm256_loadu_pd(ray_y + i), s);
    const __m256d pz = _mm256_mul_pd(_mm256_loadu_pd(ray_z + i), s);

    __m256d x = _mm256_add_pd(_mm256_mul_pd(r0, px), _mm256_mul_pd(r1, py));
    x = _mm256_add_pd(x, _mm256_mul_pd(r2, pz));
    x = _mm256_add_pd(x, t0);
    __m256d y = _mm256_add_pd(_mm256_mul_pd(r3, px), _mm256_mul_pd(r4, py));
    y = _mm256_add_pd(y, _mm256_mul_pd(r5, pz));
    y = _mm256_add_pd(y, t1);
    __m256d z = _mm256_add_pd(_mm256_mul_pd(r6, px), _mm256_mul_pd(r7, py));
    z = _mm256_add_pd(z, _mm256_mul_pd(r8, pz));
    z = _mm256_add_pd(z, t2);

    _mm256_storeu_pd(out_x + i, x);
    _mm256_storeu_pd(out_y + i, y);
    _mm256_storeu_pd(out_z + i, z);
  }
  for (std::size_t i = n4; i < n; ++i) {
    detail::compose_one(rot, trans, scale, ray_x[i], ray_y[i], ray_z[i], depth[i],
                        out_x[i], out_y[i], out_z[i]);
  }
}

double dot(const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  const std::size_t n4 = n - n % 4;
  for (std::size_t i = 0; i < n4; i += 4) {
    acc = _mm256_add_pd(acc,
                        _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  }
  // (acc0+acc2) + (acc1+acc3), matching detail::dot_blocked.
  const __m128d lo = _mm256_castpd256_pd128(acc);
  const __m128d hi = _mm256_extractf128_pd(acc, 1);
  const __m128d pair = _mm_add_pd(lo, hi);
  double sum = _mm_cvtsd_f64(pair) + _mm_cvtsd_f64(_mm_unpackhi_pd(pair, pair));
  for (std::size_t i = n4; i < n; ++i) sum += a[i] * b[i];
  return sum;
}

namespace {

// Vector body of detail::slab_test_one for four boxes at once.
inline __m256d slab_test_4(const double origin[3], const double dir[3],
                           const BoxesSoA& b, std::size_t i, double t_min,
                           double bound) {
  const __m256d ox = _mm256_set1_pd(origin[0]);
  const __m256d oy = _mm256_set1_pd(origin[1]);
  const __m256d oz = _mm256_set1_pd(origin[2]);
  const __m256d dxv = _mm256_sub_pd(ox, _mm256_loadu_pd(&b.cx[i]));
  const __m256d dyv = _mm256_sub_pd(oy, _mm256_loadu_pd(&b.cy[i]));
  const __m256d dzv = _mm256_sub_pd(oz, _mm256_loadu_pd(&b.cz[i]));
  const __m256d c = _mm256_loadu_pd(&b.cos_yaw[i]);
  const __m256d s = _mm256_loadu_pd(&b.sin_yaw[i]);

  const __m256d lx = _mm256_add_pd(_mm256_mul_pd(c, dxv), _mm256_mul_pd(s, dyv));
  const __m256d ly = _mm256_sub_pd(_mm256_mul_pd(c, dyv), _mm256_mul_pd(s, dxv));
  const __m256d rdx = _mm256_set1_pd(dir[0]);
  const __m256d rdy = _mm256_set1_pd(dir[1]);
  const __m256d ldx = _mm256_add_pd(_mm256_mul_pd(c, rdx), _mm256_mul_pd(s, rdy));
  const __m256d ldy = _mm256_sub_pd(_mm256_mul_pd(c, rdy), _mm256_mul_pd(s, rdx));

  const __m256d tiny = _mm256_set1_pd(1e-300);
  const __m256d sign_mask = _mm256_set1_pd(-0.0);
  const __m256d one = _mm256_set1_pd(1.0);
  auto clamp_div = [&](__m256d d) {
    const __m256d mag = _mm256_andnot_pd(sign_mask, d);
    const __m256d small = _mm256_cmp_pd(mag, tiny, _CMP_LE_OQ);
    const __m256d signed_tiny = _mm256_or_pd(tiny, _mm256_and_pd(sign_mask, d));
    return _mm256_blendv_pd(d, signed_tiny, small);
  };
  const __m256d ix = _mm256_div_pd(one, clamp_div(ldx));
  const __m256d iy = _mm256_div_pd(one, clamp_div(ldy));
  const __m256d iz = _mm256_div_pd(one, clamp_div(_mm256_set1_pd(dir[2])));

  const __m256d hx = _mm256_loadu_pd(&b.hx[i]);
  const __m256d hy = _mm256_loadu_pd(&b.hy[i]);
  const __m256d hz = _mm256_loadu_pd(&b.hz[i]);
  const __m256d zero = _mm256_setzero_pd();

  const __m256d tx1 = _mm256_mul_pd(_mm256_sub_pd(_mm256_sub_pd(zero, hx), lx), ix);
  const __m256d tx2 = _mm256_mul_pd(_mm256_sub_pd(hx, lx), ix);
  const __m256d ty1 = _mm256_mul_pd(_mm256_sub_pd(_mm256_sub_pd(zero, hy), ly), iy);
  const __m256d ty2 = _mm256_mul_pd(_mm256_sub_pd(hy, ly), iy);
  const __m256d tz1 = _mm256_mul_pd(_mm256_sub_pd(_mm256_sub_pd(zero, hz), dzv), iz);
  const __m256d tz2 = _mm256_mul_pd(_mm256_sub_pd(hz, dzv), iz);

  const __m256d tnear = _mm256_max_pd(
      _mm256_max_pd(_mm256_min_pd(tx1, tx2), _mm256_min_pd(ty1, ty2)),
      _mm256_min_pd(tz1, tz2));
  const __m256d tfar = _mm256_min_pd(
      _mm256_min_pd(_mm256_max_pd(tx1, tx2), _mm256_max_pd(ty1, ty2)),
      _mm256_max_pd(tz1, tz2));

  const __m256d ok = _mm256_and_pd(
      _mm256_and_pd(_mm256_cmp_pd(tnear, tfar, _CMP_LE_OQ),
                    _mm256_cmp_pd(tnear, _mm256_set1_pd(t_min), _CMP_GT_OQ)),
      _mm256_cmp_pd(tnear, _mm256_set1_pd(bound), _CMP_LE_OQ));
  return _mm256_blendv_pd(_mm256_set1_pd(-1.0), tnear, ok);
}

}  // namespace

RayHit ray_first_hit(const double origin[3], const double dir[3],
                     const BoxesSoA& boxes, double t_min, double t_max) {
  RayHit best;
  double bound = t_max;
  const std::size_t n = boxes.size();
  const std::size_t n4 = n - n % 4;
  alignas(32) double lane_t[4];
  for (std::size_t i = 0; i < n4; i += 4) {
    _mm256_store_pd(lane_t, slab_test_4(origin, dir, boxes, i, t_min, bound));
    for (int l = 0; l < 4; ++l) {
      const double t = lane_t[l];
      if (t >= 0.0 && (best.index < 0 || t < best.t)) {
        bound = t;
        best.t = t;
        best.index = static_cast<std::int32_t>(i + static_cast<std::size_t>(l));
      }
    }
  }
  for (std::size_t i = n4; i < n; ++i) {
    const double t = detail::slab_test_one(origin, dir, boxes, i, t_min, bound);
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
  if (n < 8) {
    scalar::minmax3(xs, ys, zs, n, lo, hi);
    return;
  }
  __m256d lox = _mm256_loadu_pd(xs), hix = lox;
  __m256d loy = _mm256_loadu_pd(ys), hiy = loy;
  __m256d loz = _mm256_loadu_pd(zs), hiz = loz;
  const std::size_t n4 = n - n % 4;
  for (std::size_t i = 4; i < n4; i += 4) {
    const __m256d vx = _mm256_loadu_pd(xs + i);
    const __m256d vy = _mm256_loadu_pd(ys + i);
    const __m256d vz = _mm256_loadu_pd(zs + i);
    lox = _mm256_min_pd(lox, vx);
    hix = _mm256_max_pd(hix, vx);
    loy = _mm256_min_pd(loy, vy);
    hiy = _mm256_max_pd(hiy, vy);
    loz = _mm256_min_pd(loz, vz);
    hiz = _mm256_max_pd(hiz, vz);
  }
  alignas(32) double buf[4];
  auto reduce_min = [&](__m256d v) {
    _mm256_store_pd(buf, v);
    return detail::min_pd(detail::min_pd(buf[0], buf[1]),
                          detail::min_pd(buf[2], buf[3]));
  };
  auto reduce_max = [&](__m256d v) {
    _mm256_store_pd(buf, v);
    return detail::max_pd(detail::max_pd(buf[0], buf[1]),
                          detail::max_pd(buf[2], buf[3]));
  };
  lo[0] = reduce_min(lox);
  hi[0] = reduce_max(hix);
  lo[1] = reduce_min(loy);
  hi[1] = reduce_max(hiy);
  lo[2] = reduce_min(loz);
  hi[2] = reduce_max(hiz);
  for (std::size_t i = n4; i < n; ++i) {
    lo[0] = detail::min_pd(xs[i], lo[0]);
    hi[0] = detail::max_pd(xs[i], hi[0]);
    lo[1] = detail::min_pd(ys[i], lo[1]);
    hi[1] = detail::max_pd(ys[i], hi[1]);
    lo[2] = detail::min_pd(zs[i], lo[2]);
    hi[2] = detail::max_pd(zs[i], hi[2]);
  }
}

}  // namespace asg::kernels::avx2

#endif
