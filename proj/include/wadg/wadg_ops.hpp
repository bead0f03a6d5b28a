#pragma once

// Weight-adjusted inverse mass applications. The weighted mass inverse
// inv(M_{1/w}) is replaced by the low-storage surrogate
//   T_w = Pq * diag(w_q) * Vq * inv(Mhat),
// which needs only the per-quadrature-point weights w_q per element instead
// of a factored matrix, and is exact whenever w is constant.

#include "wadg/ref_element.hpp"

#include <array>
#include <vector>

namespace wadg {

// Per-thread scratch for one element application.
struct WadgWork {
  std::vector<double> modal;
  std::vector<double> q[3];
  void resize(int Np, int Nq) {
    modal.resize(Np);
    for (auto& v : q) v.resize(Nq);
  }
};

// out = Pq * diag(wq) * Vq * inv(Mhat) * rhs for a single field.
// wq has Nq entries; rhs/out have Np entries and may alias.
void wadg_apply_inverse(const ReferenceElement& re, const double* wq,
                        const double* rhs, double* out, WadgWork& work);

// Matrix-weighted variant for the three stress fields: each point applies
// the symmetric 3x3 weight stored in six planes (11,12,13,22,23,33 order).
// rhs/out are 3*Np contiguous (field-major) and may alias. If post_add_q is
// nonnull its 3*Nq values are added after the pointwise weight, before
// projection; this is where quadrature-point source data enters so it is
// projected together with the weighted field.
void wadg_apply_inverse_sym3(const ReferenceElement& re,
                             const std::array<const double*, 6>& wq,
                             const double* rhs, double* out,
                             const double* post_add_q, WadgWork& work);

// Dense row-major Np x Np matrix of the scalar weight-adjusted application,
// for benchmarking against the matrix-free path.
std::vector<double> wadg_inverse_dense(const ReferenceElement& re,
                                       const double* wq);

// Exact weighted mass matrix (M_w)_ij = sum_q what_q w_q phi_i phi_j,
// row-major Np x Np. The surrogate above targets inv(M_{1/w}).
std::vector<double> weighted_mass_matrix(const ReferenceElement& re,
                                         const double* wq);

} // namespace wadg
