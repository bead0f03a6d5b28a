#pragma once

// Material parameter fields (density and symmetric stiffness) sampled at the
// volume quadrature points of a mesh.

#include "wadg/mesh.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

namespace wadg {

// Symmetric 3x3 stiffness acting on strains in the order (xx, yy, xy) with
// engineering shear, stored as the upper triangle.
struct Sym3 {
  double c11 = 0, c12 = 0, c13 = 0, c22 = 0, c23 = 0, c33 = 0;
};

Sym3 isotropic_stiffness(double mu, double lambda);

double sym3_min_eig(const Sym3& c);
double sym3_max_eig(const Sym3& c);
Sym3 sym3_inverse(const Sym3& c);

// Point evaluator for heterogeneous media.
using MaterialFn =
    std::function<void(double x, double y, double& rho, Sym3& c)>;

// Density and stiffness at every volume quadrature point, stiffness split
// into per-entry planes so kernels can stream them.
struct MaterialField {
  int K = 0, Nq = 0;
  std::vector<double> rho;               // K x Nq
  std::array<std::vector<double>, 6> C;  // c11,c12,c13,c22,c23,c33; K x Nq

  Sym3 at(std::size_t idx) const {
    return {C[0][idx], C[1][idx], C[2][idx], C[3][idx], C[4][idx], C[5][idx]};
  }
};

// Samples fn at the quadrature points of g. Throws invalid_input if any
// density is nonpositive or any stiffness fails to be positive definite.
MaterialField sample_material(const Geometry& g, const MaterialFn& fn);

// Unit density with an independently drawn random SPD stiffness at every
// quadrature point, eigenvalues uniform in [emin, emax]. Deterministic in
// the seed across platforms.
MaterialField random_spd_field(const Geometry& g, std::uint64_t seed,
                               double emin, double emax);

} // namespace wadg
