#pragma once

// Dense inner-loop kernels behind the solver's per-element operations.
// Every kernel has a scalar reference implementation; vectorized variants
// (AVX2 on x86-64, NEON on aarch64) are compiled in separate translation
// units and selected at runtime after a CPU feature check. All variants
// must agree with the scalar reference to floating-point reassociation
// accuracy; the test suite enforces this on random inputs.

#include <cstddef>
#include <string>
#include <vector>

namespace wadg::kernels {

enum class Backend { scalar, avx2, neon };

struct VTable {
  // y = A x with A row-major (m x n).
  void (*gemv)(std::size_t m, std::size_t n, const double* A, const double* x,
               double* y);
  // y += A x with A row-major (m x n).
  void (*gemv_acc)(std::size_t m, std::size_t n, const double* A,
                   const double* x, double* y);
  // out += a*x + b*y (pointwise).
  void (*acc2)(std::size_t n, double a, const double* x, double b,
               const double* y, double* out);
  // y = w .* x (pointwise).
  void (*mul_pointwise)(std::size_t n, const double* w, const double* x,
                        double* y);
  // Per-point symmetric 3x3 apply on structure-of-arrays data:
  //   [y0 y1 y2]_i = C_i [x0 x1 x2]_i with C_i from six coefficient arrays.
  // Outputs may alias the corresponding inputs (in-place application); every
  // implementation must load a point's inputs before storing its outputs.
  void (*sym3_apply)(std::size_t n, const double* c11, const double* c12,
                     const double* c13, const double* c22, const double* c23,
                     const double* c33, const double* x0, const double* x1,
                     const double* x2, double* y0, double* y1, double* y2);
  // Fused low-storage Runge-Kutta update:
  //   res = a*res + dt*rhs;  u += b*res.
  void (*lsrk_update)(std::size_t n, double a, double dt, double b,
                      double* res, const double* rhs, double* u);
};

// Table for a specific backend; throws wadg::config_error if it was not
// compiled in or the CPU lacks the feature.
const VTable& table(Backend b);

bool available(Backend b);
Backend active();
void select(Backend b);
// Picks the best backend the CPU supports.
void select_auto();

std::string name(Backend b);
Backend backend_from_name(const std::string& name); // "scalar"|"avx2"|"neon"|"auto"
std::vector<Backend> compiled_backends();

// Dispatching wrappers around the active table.
inline void gemv(std::size_t m, std::size_t n, const double* A, const double* x,
                 double* y) {
  table(active()).gemv(m, n, A, x, y);
}
inline void gemv_acc(std::size_t m, std::size_t n, const double* A,
                     const double* x, double* y) {
  table(active()).gemv_acc(m, n, A, x, y);
}
inline void acc2(std::size_t n, double a, const double* x, double b,
                 const double* y, double* out) {
  table(active()).acc2(n, a, x, b, y, out);
}
inline void mul_pointwise(std::size_t n, const double* w, const double* x,
                          double* y) {
  table(active()).mul_pointwise(n, w, x, y);
}
inline void sym3_apply(std::size_t n, const double* c11, const double* c12,
                       const double* c13, const double* c22, const double* c23,
                       const double* c33, const double* x0, const double* x1,
                       const double* x2, double* y0, double* y1, double* y2) {
  table(active()).sym3_apply(n, c11, c12, c13, c22, c23, c33, x0, x1, x2, y0,
                             y1, y2);
}
inline void lsrk_update(std::size_t n, double a, double dt, double b,
                        double* res, const double* rhs, double* u) {
  table(active()).lsrk_update(n, a, dt, b, res, rhs, u);
}

namespace detail {
extern const VTable scalar_vtable;
#if defined(WADG_BUILD_AVX2)
extern const VTable avx2_vtable;
#endif
#if defined(WADG_BUILD_NEON)
extern const VTable neon_vtable;
#endif
} // namespace detail

} // namespace wadg::kernels
