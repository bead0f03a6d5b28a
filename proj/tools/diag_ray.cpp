// Scratch: identify the Rayleigh material matching the reference table.
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>

#include "wadg/analysis.hpp"
#include "wadg/dg.hpp"
#include "wadg/mesh.hpp"
#include "wadg/ref_element.hpp"
#include "wadg/scenarios.hpp"
#include "wadg/time_integrator.hpp"

using namespace wadg;

// Max |PDE residual| of the exact solution over a sample grid:
//   rho dv/dt = div(sigma),  dsigma/dt = C grad_s(v)
static double pde_residual(const Scenario& sc, double mu, double lam,
                           double rho, double t) {
  const double d = 1e-5;
  auto F = [&](double x, double y, double tt, int i) {
    double out[5];
    sc.exact(x, y, tt, out);
    return out[i];
  };
  double worst = 0;
  for (int ix = 1; ix < 7; ++ix) {
    for (int iy = 1; iy < 7; ++iy) {
      const double x = sc.x0 + (sc.x1 - sc.x0) * ix / 7.0;
      const double y = sc.y0 + (sc.y1 - sc.y0) * iy / 7.0;
      auto dt = [&](int i) { return (F(x, y, t + d, i) - F(x, y, t - d, i)) / (2 * d); };
      auto dx = [&](int i) { return (F(x + d, y, t, i) - F(x - d, y, t, i)) / (2 * d); };
      auto dy = [&](int i) { return (F(x, y + d, t, i) - F(x, y - d, t, i)) / (2 * d); };
      const double r0 = rho * dt(0) - (dx(2) + dy(4));
      const double r1 = rho * dt(1) - (dx(4) + dy(3));
      const double a = 2 * mu + lam;
      const double r2 = dt(2) - (a * dx(0) + lam * dy(1));
      const double r3 = dt(3) - (lam * dx(0) + a * dy(1));
      const double r4 = dt(4) - mu * (dy(0) + dx(1));
      for (double r : {r0, r1, r2, r3, r4}) worst = std::max(worst, std::fabs(r));
    }
  }
  return worst;
}

int main(int argc, char** argv) {
  const double mu = argc > 1 ? std::atof(argv[1]) : 1.0;
  const double lam = argc > 2 ? std::atof(argv[2]) : 1.0;
  const double h = argc > 3 ? std::atof(argv[3]) : 0.25;
  const int N = argc > 4 ? std::atoi(argv[4]) : 2;
  const std::string fluxname = argc > 5 ? argv[5] : "penalty";

  Scenario sc = rayleigh_wave(mu, lam);
  const double xi = rayleigh_xi(mu, lam);
  std::printf("xi=%.15f  c=%.6f  resid=%.3e\n", xi, xi * std::sqrt(mu / 1.0),
              pde_residual(sc, mu, lam, 1.0, 0.37));

  Mesh mesh = scenario_mesh(sc, h);
  ReferenceElement re = build_reference_element(N);
  CoordinateMap coords = affine_coordinates(mesh, re);
  Geometry geo = geometric_factors(mesh, re, coords);
  MaterialField mat = sample_material(geo, sc.material);

  DgOptions opt;
  opt.flux = sc.flux;
  opt.flux.mode = fluxname == "central" ? FluxMode::central : FluxMode::penalty;
  opt.bc = sc.bc;
  DgOperator op(re, mesh, coords, geo, mat, opt, nullptr);

  State u;
  project_exact(re, geo, sc.exact, 0.0, u);
  TimeConfig tc;
  tc.t_final = sc.t_final;
  integrate(op, u, tc);

  ErrorQuadrature eq = build_error_quadrature(N, mesh, coords);
  ErrorRecord rec = l2_error(u, sc.exact, sc.t_final, eq.re, eq.geo, h,
                             opt.flux.mode);
  std::printf("mu=%g lam=%g  %s N=%d h=%g K=%d  rel=%.6e\n", mu, lam,
              fluxname.c_str(), N, h, mesh.K, rec.combined_rel);
  return 0;
}
