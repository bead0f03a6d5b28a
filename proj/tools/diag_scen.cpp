// Scratch: PDE residual and single-run error for any named scenario.
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>

#include "wadg/analysis.hpp"
#include "wadg/dg.hpp"
#include "wadg/materials.hpp"
#include "wadg/mesh.hpp"
#include "wadg/ref_element.hpp"
#include "wadg/scenarios.hpp"
#include "wadg/time_integrator.hpp"

using namespace wadg;

// Max |PDE residual| of the exact solution over an interior sample grid,
// using the anisotropic form: rho dv/dt = div(sigma), dsigma/dt = C eps(v).
static double pde_residual(const Scenario& sc, double t) {
  const double d = 1e-5;
  auto F = [&](double x, double y, double tt, int i) {
    double out[5];
    sc.exact(x, y, tt, out);
    return out[i];
  };
  double worst = 0;
  for (int ix = 1; ix < 8; ++ix) {
    for (int iy = 1; iy < 8; ++iy) {
      const double x = sc.x0 + (sc.x1 - sc.x0) * (ix + 0.03) / 8.0;
      const double y = sc.y0 + (sc.y1 - sc.y0) * (iy + 0.07) / 8.0;
      double rho;
      Sym3 c;
      sc.material(x, y, rho, c);
      auto dt = [&](int i) { return (F(x, y, t + d, i) - F(x, y, t - d, i)) / (2 * d); };
      auto dx = [&](int i) { return (F(x + d, y, t, i) - F(x - d, y, t, i)) / (2 * d); };
      auto dy = [&](int i) { return (F(x, y + d, t, i) - F(x, y - d, t, i)) / (2 * d); };
      const double e0 = dx(0), e1 = dy(1), e2 = dy(0) + dx(1);
      const double r0 = rho * dt(0) - (dx(2) + dy(4));
      const double r1 = rho * dt(1) - (dx(4) + dy(3));
      const double r2 = dt(2) - (c.c11 * e0 + c.c12 * e1 + c.c13 * e2);
      const double r3 = dt(3) - (c.c12 * e0 + c.c22 * e1 + c.c23 * e2);
      const double r4 = dt(4) - (c.c13 * e0 + c.c23 * e1 + c.c33 * e2);
      double scale = 1;
      for (int i = 0; i < 5; ++i) scale = std::max(scale, std::fabs(dt(i)));
      for (double r : {r0, r1, r2, r3, r4})
        worst = std::max(worst, std::fabs(r) / scale);
    }
  }
  return worst;
}

int main(int argc, char** argv) {
  const std::string name = argc > 1 ? argv[1] : "lamb";
  const double h = argc > 2 ? std::atof(argv[2]) : 0.25;
  const int N = argc > 3 ? std::atoi(argv[3]) : 2;
  const std::string fluxname = argc > 4 ? argv[4] : "penalty";
  const bool norun = argc > 5 && std::string(argv[5]) == "norun";

  Scenario sc = make_scenario(name);
  if (sc.exact && sc.material)
    std::printf("resid=%.3e\n", pde_residual(sc, 0.37));
  if (norun) return 0;

  Mesh mesh = scenario_mesh(sc, h);
  ReferenceElement re = build_reference_element(N);
  CoordinateMap coords = sc.warped ? warp_lamb_mesh(mesh, re)
                                   : affine_coordinates(mesh, re);
  Geometry geo = geometric_factors(mesh, re, coords);
  MaterialField mat = sample_material(geo, sc.material);

  DgOptions opt;
  opt.flux = sc.flux;
  opt.flux.mode = fluxname == "central" ? FluxMode::central : FluxMode::penalty;
  opt.bc = sc.bc;
  opt.source = sc.source;
  DgOperator op(re, mesh, coords, geo, mat, opt, nullptr);

  State u;
  project_exact(re, geo, sc.exact, 0.0, u);
  TimeConfig tc;
  tc.t_final = sc.t_final;
  integrate(op, u, tc);

  ErrorQuadrature eq = build_error_quadrature(N, mesh, coords);
  ErrorRecord rec = l2_error(u, sc.exact, sc.t_final, eq.re, eq.geo, h,
                             opt.flux.mode);
  std::printf("%s  %s N=%d h=%g K=%d  rel=%.6e\n", name.c_str(),
              fluxname.c_str(), N, h, mesh.K, rec.combined_rel);
  return 0;
}
