// Reference kernel implementations. These define the semantics the
// vectorized backends are tested against.

#include "wadg/kernels.hpp"

namespace wadg::kernels {
namespace {

void gemv_scalar(std::size_t m, std::size_t n, const double* A, const double* x,
                 double* y) {
  for (std::size_t i = 0; i < m; ++i) {
    const double* row = A + i * n;
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) acc += row[j] * x[j];
    y[i] = acc;
  }
}

void gemv_acc_scalar(std::size_t m, std::size_t n, const double* A,
                     const double* x, double* y) {
  for (std::size_t i = 0; i < m; ++i) {
    const double* row = A + i * n;
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) acc += row[j] * x[j];
    y[i] += acc;
  }
}

void acc2_scalar(std::size_t n, double a, const double* x, double b,
                 const double* y, double* out) {
  for (std::size_t i = 0; i < n; ++i) out[i] += a * x[i] + b * y[i];
}

void mul_pointwise_scalar(std::size_t n, const double* w, const double* x,
                          double* y) {
  for (std::size_t i = 0; i < n; ++i) y[i] = w[i] * x[i];
}

void sym3_apply_scalar(std::size_t n, const double* c11, const double* c12,
                       const double* c13, const double* c22, const double* c23,
                       const double* c33, const double* x0, const double* x1,
                       const double* x2, double* y0, double* y1, double* y2) {
  for (std::size_t i = 0; i < n; ++i) {
    const double a = x0[i], b = x1[i], c = x2[i];
    y0[i] = c11[i] * a + c12[i] * b + c13[i] * c;
    y1[i] = c12[i] * a + c22[i] * b + c23[i] * c;
    y2[i] = c13[i] * a + c23[i] * b + c33[i] * c;
  }
}

void lsrk_update_scalar(std::size_t n, double a, double dt, double b,
                        double* res, const double* rhs, double* u) {
  for (std::size_t i = 0; i < n; ++i) {
    const double r = a * res[i] + dt * rhs[i];
    res[i] = r;
    u[i] += b * r;
  }
}

} // namespace

namespace detail {
const VTable scalar_vtable = {
    gemv_scalar,          gemv_acc_scalar, acc2_scalar,
    mul_pointwise_scalar, sym3_apply_scalar, lsrk_update_scalar,
};
} // namespace detail

} // namespace wadg::kernels
