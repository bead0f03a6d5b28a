#include "wadg/wadg_ops.hpp"

#include "wadg/kernels.hpp"

#include <Eigen/Dense>

namespace wadg {

void wadg_apply_inverse(const ReferenceElement& re, const double* wq,
                        const double* rhs, double* out, WadgWork& work) {
  const int Np = re.Np, Nq = re.Nq;
  kernels::gemv(Np, Np, re.Minv.data(), rhs, work.modal.data());
  kernels::gemv(Nq, Np, re.Vq.data(), work.modal.data(), work.q[0].data());
  kernels::mul_pointwise(Nq, wq, work.q[0].data(), work.q[1].data());
  kernels::gemv(Np, Nq, re.Pq.data(), work.q[1].data(), out);
}

void wadg_apply_inverse_sym3(const ReferenceElement& re,
                             const std::array<const double*, 6>& wq,
                             const double* rhs, double* out,
                             const double* post_add_q, WadgWork& work) {
  const int Np = re.Np, Nq = re.Nq;
  double* q0 = work.q[0].data();
  double* q1 = work.q[1].data();
  double* q2 = work.q[2].data();
  for (int f = 0; f < 3; ++f) {
    kernels::gemv(Np, Np, re.Minv.data(), rhs + f * Np, work.modal.data());
    kernels::gemv(Nq, Np, re.Vq.data(), work.modal.data(), work.q[f].data());
  }
  kernels::sym3_apply(Nq, wq[0], wq[1], wq[2], wq[3], wq[4], wq[5], q0, q1, q2,
                      q0, q1, q2);
  if (post_add_q) {
    for (int f = 0; f < 3; ++f) {
      double* q = work.q[f].data();
      const double* add = post_add_q + f * Nq;
      for (int i = 0; i < Nq; ++i) q[i] += add[i];
    }
  }
  for (int f = 0; f < 3; ++f)
    kernels::gemv(Np, Nq, re.Pq.data(), work.q[f].data(), out + f * Np);
}

std::vector<double> wadg_inverse_dense(const ReferenceElement& re,
                                       const double* wq) {
  using Mat =
      Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  const int Np = re.Np, Nq = re.Nq;
  Eigen::Map<const Mat> Pq(re.Pq.data(), Np, Nq);
  Eigen::Map<const Mat> Vq(re.Vq.data(), Nq, Np);
  Eigen::Map<const Mat> Minv(re.Minv.data(), Np, Np);
  Eigen::Map<const Eigen::VectorXd> w(wq, Nq);
  std::vector<double> dense(static_cast<std::size_t>(Np) * Np);
  Eigen::Map<Mat>(dense.data(), Np, Np) = Pq * w.asDiagonal() * Vq * Minv;
  return dense;
}

std::vector<double> weighted_mass_matrix(const ReferenceElement& re,
                                         const double* wq) {
  using Mat =
      Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  const int Np = re.Np, Nq = re.Nq;
  Eigen::Map<const Mat> Vq(re.Vq.data(), Nq, Np);
  std::vector<double> mass(static_cast<std::size_t>(Np) * Np);
  Eigen::VectorXd ww(Nq);
  for (int q = 0; q < Nq; ++q) ww(q) = re.volq.w[q] * wq[q];
  Eigen::Map<Mat>(mass.data(), Np, Np) =
      Vq.transpose() * ww.asDiagonal() * Vq;
  return mass;
}

} // namespace wadg
