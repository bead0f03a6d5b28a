#pragma once

// Reference triangle discretization: orthonormal modal basis, volume and
// face quadrature, and the operator matrices every element shares.
//
// Reference element: vertices (-1,-1), (1,-1), (-1,1); area 2.
// Faces, each parameterized by xi in [-1,1] running counterclockwise:
//   face 0: (-1,-1) -> ( 1,-1)
//   face 1: ( 1,-1) -> (-1, 1)
//   face 2: (-1, 1) -> (-1,-1)

#include <array>
#include <cstddef>
#include <vector>

namespace wadg {

inline constexpr int kMaxDegree = 7;

// Nodes and weights of an n-point rule on [-1,1].
struct Quadrature1D {
  std::vector<double> x;
  std::vector<double> w;
};

// Gauss rule for the Jacobi weight (1-x)^alpha (1+x)^beta, exact through
// degree 2n-1. Golub-Welsch on the symmetric recurrence matrix.
Quadrature1D gauss_jacobi(int n, double alpha, double beta);

// Quadrature on the reference triangle; weights sum to 2 (its area).
struct TriangleQuadrature {
  std::vector<double> r;
  std::vector<double> s;
  std::vector<double> w;
};

// Rule exact for total degree <= degree, built as a collapsed-coordinate
// product of Gauss and Gauss-Jacobi(1,0) rules.
TriangleQuadrature triangle_quadrature(int degree);

// Orthonormal (Koornwinder-Dubiner) basis of total degree <= N evaluated at
// the given points. V is row-major (npts x Np) with Np = (N+1)(N+2)/2;
// column order is i-major over pairs (i,j), i+j <= N. The first basis
// function is the constant 1/sqrt(2).
void basis_eval(int N, std::size_t npts, const double* r, const double* s,
                double* V);
void basis_grad_eval(int N, std::size_t npts, const double* r, const double* s,
                     double* Vr, double* Vs);

struct ReferenceElement {
  int N = 0;
  int Np = 0;   // modal coefficients per field
  int Nq = 0;   // volume quadrature points
  int Nfq = 0;  // quadrature points per face

  TriangleQuadrature volq;

  // Row-major operator matrices.
  std::vector<double> Vq;   // Nq x Np   basis at volume points
  std::vector<double> Vrq;  // Nq x Np   d/dr at volume points
  std::vector<double> Vsq;  // Nq x Np   d/ds at volume points
  std::vector<double> M;    // Np x Np   quadrature mass matrix (identity to roundoff)
  std::vector<double> Minv; // Np x Np
  std::vector<double> Pq;   // Np x Nq   Minv Vq^T diag(w): quadrature L2 projection
  std::vector<double> Sr;   // Np x Np   (Sr)_ij = int phi_j,r phi_i
  std::vector<double> Ss;   // Np x Np

  // Face quadrature: same 1D Gauss nodes/weights on every face.
  Quadrature1D faceq;
  std::array<std::vector<double>, 3> face_r, face_s; // ref coords of face points
  std::array<std::vector<double>, 3> Vf;   // Nfq x Np  traces
  std::array<std::vector<double>, 3> Vfr;  // Nfq x Np  d/dr at face points
  std::array<std::vector<double>, 3> Vfs;  // Nfq x Np
  std::array<std::vector<double>, 3> Lf;   // Np x Nfq  Minv Vf^T diag(wf)

  // Equispaced interpolation nodes for isoparametric geometry. Edge nodes
  // are shared between neighboring elements so interpolated coordinate maps
  // stay watertight.
  std::vector<double> node_r, node_s;  // Np
  std::vector<double> Vnode;           // Np x Np  basis at nodes
  std::vector<double> nodal_to_modal;  // Np x Np  inverse of Vnode
};

// quad_degree: volume quadrature exactness; defaults to 2N+1 when <0.
ReferenceElement build_reference_element(int N, int quad_degree = -1);

// Closed-form integral of r^i s^j over the reference triangle (test oracle
// and exactness checks).
double reference_triangle_monomial_integral(int i, int j);

} // namespace wadg
