// Scratch diagnostic: harmonic errors on alternative uniform triangulation
// patterns and measurement conventions. Not part of the build.

#include "wadg/analysis.hpp"
#include "wadg/dg.hpp"
#include "wadg/driver.hpp"
#include "wadg/kernels.hpp"
#include "wadg/time_integrator.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <string>
#include <vector>

using namespace wadg;

static Mesh make_pattern(const std::string& pattern, int n) {
  Mesh m;
  m.nx = n;
  m.ny = n;
  m.x0 = 0;
  m.x1 = 1;
  m.y0 = 0;
  m.y1 = 1;
  const auto vid = [n](int i, int j) { return j * (n + 1) + i; };
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i)
      m.verts.push_back({double(i) / n, double(j) / n});
  if (pattern == "jack") {
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) {
        const int v00 = vid(i, j), v10 = vid(i + 1, j);
        const int v01 = vid(i, j + 1), v11 = vid(i + 1, j + 1);
        if ((i + j) % 2 == 0) {
          m.tris.push_back({v00, v10, v11});
          m.tris.push_back({v00, v11, v01});
        } else {
          m.tris.push_back({v00, v10, v01});
          m.tris.push_back({v10, v11, v01});
        }
      }
    }
  } else if (pattern == "same") {
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) {
        const int v00 = vid(i, j), v10 = vid(i + 1, j);
        const int v01 = vid(i, j + 1), v11 = vid(i + 1, j + 1);
        m.tris.push_back({v00, v10, v11});
        m.tris.push_back({v00, v11, v01});
      }
    }
  } else { // criss-cross
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) {
        const int v00 = vid(i, j), v10 = vid(i + 1, j);
        const int v01 = vid(i, j + 1), v11 = vid(i + 1, j + 1);
        const int c = (int)m.verts.size();
        m.verts.push_back({(i + 0.5) / n, (j + 0.5) / n});
        m.tris.push_back({v00, v10, c});
        m.tris.push_back({v10, v11, c});
        m.tris.push_back({v11, v01, c});
        m.tris.push_back({v01, v00, c});
      }
    }
  }
  m.K = (int)m.tris.size();
  connect(m);
  return m;
}

// Nodal interpolant of the closed-form fields at time t.
static void interpolate_exact(const ReferenceElement& re,
                              const CoordinateMap& coords, const ExactFn& ex,
                              double t, int K, State& u) {
  u.resize(K, re.Np);
  std::vector<double> xn(re.Np), yn(re.Np), fn(re.Np);
  double vals[kFields];
  for (int k = 0; k < K; ++k) {
    kernels::gemv(re.Np, re.Np, re.Vnode.data(),
                  &coords.x[(std::size_t)k * re.Np], xn.data());
    kernels::gemv(re.Np, re.Np, re.Vnode.data(),
                  &coords.y[(std::size_t)k * re.Np], yn.data());
    for (int f = 0; f < kFields; ++f) {
      for (int i = 0; i < re.Np; ++i) {
        ex(xn[i], yn[i], t, vals);
        fn[i] = vals[f];
      }
      kernels::gemv(re.Np, re.Np, re.nodal_to_modal.data(), fn.data(),
                    u.field(k, f));
    }
  }
}

int main(int argc, char** argv) {
  const std::string pattern = argc > 1 ? argv[1] : "jack";
  const std::string fluxname = argc > 2 ? argv[2] : "central";
  const int N = argc > 3 ? std::atoi(argv[3]) : 2;
  const std::string mode = argc > 4 ? argv[4] : "plain";

  Scenario sc = make_scenario("harmonic");
  for (int n : {4, 8}) {
    Mesh mesh = make_pattern(pattern, n);
    ReferenceElement re = build_reference_element(N);
    CoordinateMap coords = affine_coordinates(mesh, re);
    Geometry geo = geometric_factors(mesh, re, coords);
    MaterialField mat = sample_material(geo, sc.material);

    DgOptions opt;
    opt.flux = sc.flux;
    opt.flux.mode =
        fluxname == "central" ? FluxMode::central : FluxMode::penalty;
    if (const char* tv = std::getenv("TAU")) {
      opt.flux.tau_v = std::atof(tv);
      opt.flux.tau_sigma = std::atof(tv);
    }
    if (const char* tv = std::getenv("TAUV")) opt.flux.tau_v = std::atof(tv);
    if (const char* ts = std::getenv("TAUS")) opt.flux.tau_sigma = std::atof(ts);
    opt.bc = sc.bc;
    opt.source = sc.source;
    DgOperator op(re, mesh, coords, geo, mat, opt, nullptr);

    State u;
    if (mode == "interpic" || mode == "both")
      interpolate_exact(re, coords, sc.exact, 0.0, mesh.K, u);
    else
      project_exact(re, geo, sc.exact, 0.0, u);
    TimeConfig tc;
    tc.t_final = sc.t_final;
    integrate(op, u, tc);

    ErrorQuadrature eq = build_error_quadrature(N, mesh, coords);
    ErrorRecord rec;
    if (mode == "interr" || mode == "both") {
      // Error against the nodal interpolant of the exact solution.
      State ui;
      interpolate_exact(re, coords, sc.exact, sc.t_final, mesh.K, ui);
      std::vector<double> diff(eq.re.Nq), uq(eq.re.Nq);
      double err2 = 0, norm2 = 0;
      std::vector<double> a(re.Np);
      for (int k = 0; k < mesh.K; ++k) {
        const double* J = &eq.geo.J[(std::size_t)k * eq.geo.Nq];
        for (int f = 0; f < kFields; ++f) {
          for (int i = 0; i < re.Np; ++i)
            a[i] = u.field(k, f)[i] - ui.field(k, f)[i];
          kernels::gemv(eq.re.Nq, re.Np, eq.re.Vq.data(), a.data(),
                        diff.data());
          kernels::gemv(eq.re.Nq, re.Np, eq.re.Vq.data(), ui.field(k, f),
                        uq.data());
          for (int q = 0; q < eq.re.Nq; ++q) {
            err2 += eq.re.volq.w[q] * J[q] * diff[q] * diff[q];
            norm2 += eq.re.volq.w[q] * J[q] * uq[q] * uq[q];
          }
        }
      }
      rec.combined_rel = std::sqrt(err2 / norm2);
    } else {
      rec = l2_error(u, sc.exact, sc.t_final, eq.re, eq.geo);
    }
    std::printf("%-5s %-8s N=%d %-8s n=%2d K=%4d  rel=%.6e\n", pattern.c_str(),
                fluxname.c_str(), N, mode.c_str(), n, mesh.K,
                rec.combined_rel);
  }
  return 0;
}
