#pragma once

// Quantitative verification tools: L2 errors against closed-form fields,
// discrete energy, dense assembly of the semi-discrete operator with
// eigenvalue extraction, convergence-rate regression, and L2 projection of
// prescribed fields onto the broken polynomial space.

#include "wadg/dg.hpp"
#include "wadg/scenarios.hpp"

#include <Eigen/Dense>

#include <complex>
#include <vector>

namespace wadg {

struct ErrorRecord {
  int N = 0;
  double h = 0;
  FluxMode flux = FluxMode::penalty;
  std::array<double, kFields> field_error{}; // absolute per-field L2
  std::array<double, kFields> field_norm{};  // L2 norms of the exact fields
  double combined_abs = 0;
  double combined_rel = 0; // root-sum-square over fields, normalized
  double velocity_rel = 0; // v components only
  double stress_rel = 0;   // sigma components only
  double runtime_seconds = 0;
};

// Volume-quadrature L2 errors of u against the closed-form fields at time t.
// Relative errors fall back to absolute ones when the exact norm vanishes.
ErrorRecord l2_error(const State& u, const ExactFn& exact, double t,
                     const ReferenceElement& re, const Geometry& geo,
                     double h = 0, FluxMode flux = FluxMode::penalty);

// Elevated quadrature for measuring errors: the solver's rule is exact for
// the discrete operator but under-samples |u_h - u|^2 of non-polynomial
// fields on coarse meshes. Pairs a reference element rebuilt with a
// degree-(2N+8) rule (or the given degree) with matching geometric factors.
struct ErrorQuadrature {
  ReferenceElement re;
  Geometry geo;
};

ErrorQuadrature build_error_quadrature(int N, const Mesh& mesh,
                                       const CoordinateMap& coords,
                                       int degree = -1);

// Physical energy 1/2 sum_k [(rho v, v) + (C^-1 sigma, sigma)] by volume
// quadrature; the stress term solves a 3x3 system at every quadrature point.
double discrete_energy(const State& u, const ReferenceElement& re,
                       const Geometry& geo, const MaterialField& mat);

// Dense matrix of the semi-discrete operator: column j is the right-hand
// side applied to the j-th canonical coefficient vector at t = 0. Requires
// a homogeneous operator (no sources, zero boundary data) and refuses
// systems larger than max_ndof.
Eigen::MatrixXd assemble_operator(const DgOperator& op, int max_ndof = 6000);

struct SpectrumRecord {
  std::vector<std::complex<double>> eigenvalues; // sorted by real part
  double abscissa = 0; // max real part
  double radius = 0;   // max modulus
};

// All eigenvalues of a dense matrix via the QR algorithm (LAPACK dgeev).
SpectrumRecord spectrum(const Eigen::MatrixXd& a);

struct RateSeries {
  int N = 0;
  std::vector<double> h;        // sorted coarse to fine
  std::vector<double> error;
  std::vector<double> pairwise; // log(e_i/e_{i+1}) / log(h_i/h_{i+1})
  double fitted = 0;            // least-squares slope of log e vs log h
};

// Groups records by polynomial degree and fits convergence rates. Requires
// positive errors and at least two mesh sizes per degree.
std::vector<RateSeries> convergence_rates(const std::vector<ErrorRecord>& recs);

// Elementwise L2 projection of prescribed fields onto the polynomial space,
// evaluated through the volume quadrature rule.
void project_fields(const ReferenceElement& re, const Geometry& geo,
                    const InitialFn& fields, State& u);
void project_exact(const ReferenceElement& re, const Geometry& geo,
                   const ExactFn& exact, double t, State& u);

} // namespace wadg
