#include "wadg/materials.hpp"

#include "wadg/errors.hpp"

#include <Eigen/Dense>

#include <cmath>

namespace wadg {

namespace {

Eigen::Matrix3d to_matrix(const Sym3& c) {
  Eigen::Matrix3d m;
  m << c.c11, c.c12, c.c13, c.c12, c.c22, c.c23, c.c13, c.c23, c.c33;
  return m;
}

// Fixed-increment SplitMix64; used instead of std:: engines so seeded fields
// are bit-identical across standard library implementations.
std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double uniform01(std::uint64_t& state) {
  return static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53;
}

double standard_normal(std::uint64_t& state) {
  double u1 = uniform01(state);
  while (u1 <= 0.0) u1 = uniform01(state);
  const double u2 = uniform01(state);
  const double pi = 3.14159265358979323846;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * pi * u2);
}

} // namespace

Sym3 isotropic_stiffness(double mu, double lambda) {
  return {2.0 * mu + lambda, lambda, 0.0, 2.0 * mu + lambda, 0.0, mu};
}

double sym3_min_eig(const Sym3& c) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(to_matrix(c));
  return es.eigenvalues()(0);
}

double sym3_max_eig(const Sym3& c) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(to_matrix(c));
  return es.eigenvalues()(2);
}

Sym3 sym3_inverse(const Sym3& c) {
  const Eigen::Matrix3d inv = to_matrix(c).inverse();
  return {inv(0, 0), inv(0, 1), inv(0, 2), inv(1, 1), inv(1, 2), inv(2, 2)};
}

namespace {

MaterialField allocate_field(const Geometry& g) {
  MaterialField mat;
  mat.K = g.K;
  mat.Nq = g.Nq;
  const std::size_t n = static_cast<std::size_t>(g.K) * g.Nq;
  mat.rho.resize(n);
  for (auto& plane : mat.C) plane.resize(n);
  return mat;
}

} // namespace

MaterialField sample_material(const Geometry& g, const MaterialFn& fn) {
  MaterialField mat = allocate_field(g);
  const std::size_t n = mat.rho.size();
  for (std::size_t i = 0; i < n; ++i) {
    double rho = 0;
    Sym3 c;
    fn(g.xq[i], g.yq[i], rho, c);
    if (!(rho > 0.0))
      throw invalid_input("sample_material: nonpositive density");
    if (!(sym3_min_eig(c) > 0.0))
      throw invalid_input("sample_material: stiffness not positive definite");
    mat.rho[i] = rho;
    mat.C[0][i] = c.c11;
    mat.C[1][i] = c.c12;
    mat.C[2][i] = c.c13;
    mat.C[3][i] = c.c22;
    mat.C[4][i] = c.c23;
    mat.C[5][i] = c.c33;
  }
  return mat;
}

MaterialField random_spd_field(const Geometry& g, std::uint64_t seed,
                               double emin, double emax) {
  if (!(emin > 0.0) || !(emax >= emin))
    throw invalid_input("random_spd_field: need 0 < emin <= emax");
  MaterialField mat = allocate_field(g);
  std::uint64_t state = seed;
  const std::size_t n = mat.rho.size();
  for (std::size_t i = 0; i < n; ++i) {
    // Random orthonormal frame from Gram-Schmidt on Gaussian columns,
    // redrawn if the sample is close to singular.
    Eigen::Matrix3d q;
    while (true) {
      Eigen::Matrix3d a;
      for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) a(r, c) = standard_normal(state);
      Eigen::Vector3d q0 = a.col(0);
      if (q0.norm() < 1e-8) continue;
      q0.normalize();
      Eigen::Vector3d q1 = a.col(1) - q0.dot(a.col(1)) * q0;
      if (q1.norm() < 1e-8) continue;
      q1.normalize();
      Eigen::Vector3d q2 =
          a.col(2) - q0.dot(a.col(2)) * q0 - q1.dot(a.col(2)) * q1;
      if (q2.norm() < 1e-8) continue;
      q2.normalize();
      q.col(0) = q0;
      q.col(1) = q1;
      q.col(2) = q2;
      break;
    }
    Eigen::Vector3d d;
    for (int r = 0; r < 3; ++r)
      d(r) = emin + (emax - emin) * uniform01(state);
    const Eigen::Matrix3d c = q * d.asDiagonal() * q.transpose();
    mat.rho[i] = 1.0;
    mat.C[0][i] = c(0, 0);
    mat.C[1][i] = c(0, 1);
    mat.C[2][i] = c(0, 2);
    mat.C[3][i] = c(1, 1);
    mat.C[4][i] = c(1, 2);
    mat.C[5][i] = c(2, 2);
  }
  return mat;
}

} // namespace wadg
