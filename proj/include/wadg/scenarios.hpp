#pragma once

// Catalog of simulation setups: analytic wave solutions used to verify
// convergence (harmonic oscillation, Rayleigh, Lamb, Stoneley, manufactured
// plane wave) and application problems without closed-form solutions (stiff
// inclusion, anisotropic two-media, heterogeneous reference, incompressible
// sweep). Each scenario bundles the domain, material, boundary conditions,
// sources, default flux and final time, plus closed-form fields with
// analytically differentiated stresses where they exist.

#include "wadg/dg.hpp"
#include "wadg/materials.hpp"
#include "wadg/mesh.hpp"

#include <functional>
#include <string>
#include <vector>

namespace wadg {

// Tabulated relative L2 error for a (degree, mesh size) pair with the
// penalty flux; consumed by the verification harness.
struct RefError {
  int N;
  double h;
  double error;
};

// Five-field evaluation (v1, v2, sxx, syy, sxy).
using ExactFn =
    std::function<void(double x, double y, double t, double out[5])>;
using InitialFn = std::function<void(double x, double y, double out[5])>;

// Marks a scenario whose stiffness is drawn independently at every volume
// quadrature point instead of sampled from a pointwise function; the run
// harness then builds the material with random_spd_field.
struct RandomMedia {
  bool enabled = false;
  double eig_min = 0.1;
  double eig_max = 1.0;
};

struct Scenario {
  std::string name;
  std::string summary;
  double x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  Periodic periodic;
  MaterialFn material;
  RandomMedia random_media;
  std::array<BoundaryCondition, 4> bc; // indexed by mesh Side
  SourceSpec source;
  FluxSpec flux;
  double t_final = 5;
  bool warped = false; // build curvilinear coordinates via the waveguide warp
  // Force odd quad counts so features on grid midlines (the stoneley
  // interface at y = 0) cut through element interiors.
  bool odd_grid = false;
  ExactFn exact;       // null when no closed-form solution exists
  InitialFn initial;   // overrides exact-at-t=0 when set
  std::vector<RefError> reference;
};

Scenario harmonic_oscillation();
// Default Rayleigh material: lambda = 10 mu sets the speed ratio xi, and mu
// is scaled by 1/xi^2 so the surface-wave speed is exactly 1; the solution
// then has unit period in both y and t (frequency 2 pi).
Scenario rayleigh_wave();
Scenario rayleigh_wave(double mu, double lambda);
Scenario lamb_wave();
Scenario lamb_wave_warped();
Scenario stoneley_wave(bool fitted = true);
Scenario manufactured_plane_wave();
Scenario heterogeneous_reference();
Scenario stiff_inclusion();
Scenario aniso_two_media();
// Rayleigh material with lambda = 1 and final time 1/(4 sqrt(mu)), used to
// probe the near-incompressible regime mu << lambda.
Scenario incompressible_case(double mu);
// Periodic unit square with random SPD stiffness per quadrature point; used
// for operator spectra rather than time-domain accuracy.
Scenario random_media_spectrum(double eig_min = 0.1, double eig_max = 1.0);

// The application setups without closed-form solutions, fully configured.
std::vector<Scenario> application_scenarios();

// Admissible root in (0,1) of
//   sqrt(1-xi^2) sqrt(1 - xi^2 mu/(2 mu+lambda)) - (xi^2/2 - 1)^2 = 0,
// the surface-wave speed ratio xi = c_r / sqrt(mu/rho).
double rayleigh_xi(double mu, double lambda);

std::vector<std::string> scenario_names();
Scenario make_scenario(const std::string& name);

// Uniform triangulation of the scenario's rectangle with square cells of
// size close to h (exact when both extents are multiples of h).
Mesh scenario_mesh(const Scenario& sc, double h);

// Initial fields: the scenario's initial function if set, otherwise the
// exact solution at t = 0, otherwise zero.
InitialFn initial_condition(const Scenario& sc);

} // namespace wadg
