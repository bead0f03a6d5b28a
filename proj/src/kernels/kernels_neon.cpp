// NEON kernel variants for aarch64, where 128-bit SIMD is baseline.

#include "wadg/kernels.hpp"

#if defined(WADG_BUILD_NEON)

#include <arm_neon.h>

namespace wadg::kernels {
namespace {

inline double dot_neon(std::size_t n, const double* a, const double* b) {
  std::size_t j = 0;
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  for (; j + 4 <= n; j += 4) {
    acc0 = vfmaq_f64(acc0, vld1q_f64(a + j), vld1q_f64(b + j));
    acc1 = vfmaq_f64(acc1, vld1q_f64(a + j + 2), vld1q_f64(b + j + 2));
  }
  if (j + 2 <= n) {
    acc0 = vfmaq_f64(acc0, vld1q_f64(a + j), vld1q_f64(b + j));
    j += 2;
  }
  double acc = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; j < n; ++j) acc += a[j] * b[j];
  return acc;
}

void gemv_neon(std::size_t m, std::size_t n, const double* A, const double* x,
               double* y) {
  for (std::size_t i = 0; i < m; ++i) y[i] = dot_neon(n, A + i * n, x);
}

void gemv_acc_neon(std::size_t m, std::size_t n, const double* A,
                   const double* x, double* y) {
  for (std::size_t i = 0; i < m; ++i) y[i] += dot_neon(n, A + i * n, x);
}

void acc2_neon(std::size_t n, double a, const double* x, double b,
               const double* y, double* out) {
  const float64x2_t va = vdupq_n_f64(a);
  const float64x2_t vb = vdupq_n_f64(b);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    float64x2_t acc = vld1q_f64(out + i);
    acc = vfmaq_f64(acc, va, vld1q_f64(x + i));
    acc = vfmaq_f64(acc, vb, vld1q_f64(y + i));
    vst1q_f64(out + i, acc);
  }
  for (; i < n; ++i) out[i] += a * x[i] + b * y[i];
}

void mul_pointwise_neon(std::size_t n, const double* w, const double* x,
                        double* y) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2)
    vst1q_f64(y + i, vmulq_f64(vld1q_f64(w + i), vld1q_f64(x + i)));
  for (; i < n; ++i) y[i] = w[i] * x[i];
}

void sym3_apply_neon(std::size_t n, const double* c11, const double* c12,
                     const double* c13, const double* c22, const double* c23,
                     const double* c33, const double* x0, const double* x1,
                     const double* x2, double* y0, double* y1, double* y2) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t a = vld1q_f64(x0 + i);
    const float64x2_t b = vld1q_f64(x1 + i);
    const float64x2_t c = vld1q_f64(x2 + i);
    const float64x2_t m11 = vld1q_f64(c11 + i);
    const float64x2_t m12 = vld1q_f64(c12 + i);
    const float64x2_t m13 = vld1q_f64(c13 + i);
    const float64x2_t m22 = vld1q_f64(c22 + i);
    const float64x2_t m23 = vld1q_f64(c23 + i);
    const float64x2_t m33 = vld1q_f64(c33 + i);
    float64x2_t r0 = vmulq_f64(m11, a);
    r0 = vfmaq_f64(r0, m12, b);
    r0 = vfmaq_f64(r0, m13, c);
    float64x2_t r1 = vmulq_f64(m12, a);
    r1 = vfmaq_f64(r1, m22, b);
    r1 = vfmaq_f64(r1, m23, c);
    float64x2_t r2 = vmulq_f64(m13, a);
    r2 = vfmaq_f64(r2, m23, b);
    r2 = vfmaq_f64(r2, m33, c);
    vst1q_f64(y0 + i, r0);
    vst1q_f64(y1 + i, r1);
    vst1q_f64(y2 + i, r2);
  }
  for (; i < n; ++i) {
    const double a = x0[i], b = x1[i], c = x2[i];
    y0[i] = c11[i] * a + c12[i] * b + c13[i] * c;
    y1[i] = c12[i] * a + c22[i] * b + c23[i] * c;
    y2[i] = c13[i] * a + c23[i] * b + c33[i] * c;
  }
}

void lsrk_update_neon(std::size_t n, double a, double dt, double b, double* res,
                      const double* rhs, double* u) {
  const float64x2_t va = vdupq_n_f64(a);
  const float64x2_t vdt = vdupq_n_f64(dt);
  const float64x2_t vb = vdupq_n_f64(b);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    float64x2_t r = vmulq_f64(va, vld1q_f64(res + i));
    r = vfmaq_f64(r, vdt, vld1q_f64(rhs + i));
    vst1q_f64(res + i, r);
    vst1q_f64(u + i, vfmaq_f64(vld1q_f64(u + i), vb, r));
  }
  for (; i < n; ++i) {
    const double r = a * res[i] + dt * rhs[i];
    res[i] = r;
    u[i] += b * r;
  }
}

} // namespace

namespace detail {
const VTable neon_vtable = {
    gemv_neon,          gemv_acc_neon,   acc2_neon,
    mul_pointwise_neon, sym3_apply_neon, lsrk_update_neon,
};
} // namespace detail

} // namespace wadg::kernels

#endif // WADG_BUILD_NEON
