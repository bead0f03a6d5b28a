// AVX2+FMA kernel variants. Compiled with -mavx2 -mfma in this translation
// unit only; the dispatcher routes here after __builtin_cpu_supports checks.

#include "wadg/kernels.hpp"

#if defined(WADG_BUILD_AVX2)

#include <immintrin.h>

namespace wadg::kernels {
namespace {

inline double hsum4(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d swapped = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, swapped));
}

inline double dot_avx2(std::size_t n, const double* a, const double* b) {
  std::size_t j = 0;
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  for (; j + 8 <= n; j += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + j), _mm256_loadu_pd(b + j), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + j + 4), _mm256_loadu_pd(b + j + 4), acc1);
  }
  if (j + 4 <= n) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + j), _mm256_loadu_pd(b + j), acc0);
    j += 4;
  }
  double acc = hsum4(_mm256_add_pd(acc0, acc1));
  for (; j < n; ++j) acc += a[j] * b[j];
  return acc;
}

void gemv_avx2(std::size_t m, std::size_t n, const double* A, const double* x,
               double* y) {
  for (std::size_t i = 0; i < m; ++i) y[i] = dot_avx2(n, A + i * n, x);
}

void gemv_acc_avx2(std::size_t m, std::size_t n, const double* A,
                   const double* x, double* y) {
  for (std::size_t i = 0; i < m; ++i) y[i] += dot_avx2(n, A + i * n, x);
}

void acc2_avx2(std::size_t n, double a, const double* x, double b,
               const double* y, double* out) {
  const __m256d va = _mm256_set1_pd(a);
  const __m256d vb = _mm256_set1_pd(b);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d acc = _mm256_loadu_pd(out + i);
    acc = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), acc);
    acc = _mm256_fmadd_pd(vb, _mm256_loadu_pd(y + i), acc);
    _mm256_storeu_pd(out + i, acc);
  }
  for (; i < n; ++i) out[i] += a * x[i] + b * y[i];
}

void mul_pointwise_avx2(std::size_t n, const double* w, const double* x,
                        double* y) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(y + i, _mm256_mul_pd(_mm256_loadu_pd(w + i),
                                          _mm256_loadu_pd(x + i)));
  }
  for (; i < n; ++i) y[i] = w[i] * x[i];
}

void sym3_apply_avx2(std::size_t n, const double* c11, const double* c12,
                     const double* c13, const double* c22, const double* c23,
                     const double* c33, const double* x0, const double* x1,
                     const double* x2, double* y0, double* y1, double* y2) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d a = _mm256_loadu_pd(x0 + i);
    const __m256d b = _mm256_loadu_pd(x1 + i);
    const __m256d c = _mm256_loadu_pd(x2 + i);
    const __m256d m11 = _mm256_loadu_pd(c11 + i);
    const __m256d m12 = _mm256_loadu_pd(c12 + i);
    const __m256d m13 = _mm256_loadu_pd(c13 + i);
    const __m256d m22 = _mm256_loadu_pd(c22 + i);
    const __m256d m23 = _mm256_loadu_pd(c23 + i);
    const __m256d m33 = _mm256_loadu_pd(c33 + i);
    __m256d r0 = _mm256_mul_pd(m11, a);
    r0 = _mm256_fmadd_pd(m12, b, r0);
    r0 = _mm256_fmadd_pd(m13, c, r0);
    __m256d r1 = _mm256_mul_pd(m12, a);
    r1 = _mm256_fmadd_pd(m22, b, r1);
    r1 = _mm256_fmadd_pd(m23, c, r1);
    __m256d r2 = _mm256_mul_pd(m13, a);
    r2 = _mm256_fmadd_pd(m23, b, r2);
    r2 = _mm256_fmadd_pd(m33, c, r2);
    _mm256_storeu_pd(y0 + i, r0);
    _mm256_storeu_pd(y1 + i, r1);
    _mm256_storeu_pd(y2 + i, r2);
  }
  for (; i < n; ++i) {
    const double a = x0[i], b = x1[i], c = x2[i];
    y0[i] = c11[i] * a + c12[i] * b + c13[i] * c;
    y1[i] = c12[i] * a + c22[i] * b + c23[i] * c;
    y2[i] = c13[i] * a + c23[i] * b + c33[i] * c;
  }
}

void lsrk_update_avx2(std::size_t n, double a, double dt, double b, double* res,
                      const double* rhs, double* u) {
  const __m256d va = _mm256_set1_pd(a);
  const __m256d vdt = _mm256_set1_pd(dt);
  const __m256d vb = _mm256_set1_pd(b);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d r = _mm256_mul_pd(va, _mm256_loadu_pd(res + i));
    r = _mm256_fmadd_pd(vdt, _mm256_loadu_pd(rhs + i), r);
    _mm256_storeu_pd(res + i, r);
    __m256d uu = _mm256_fmadd_pd(vb, r, _mm256_loadu_pd(u + i));
    _mm256_storeu_pd(u + i, uu);
  }
  for (; i < n; ++i) {
    const double r = a * res[i] + dt * rhs[i];
    res[i] = r;
    u[i] += b * r;
  }
}

} // namespace

namespace detail {
const VTable avx2_vtable = {
    gemv_avx2,          gemv_acc_avx2,   acc2_avx2,
    mul_pointwise_avx2, sym3_apply_avx2, lsrk_update_avx2,
};
} // namespace detail

} // namespace wadg::kernels

#endif // WADG_BUILD_AVX2
