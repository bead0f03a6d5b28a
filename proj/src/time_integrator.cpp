#include "wadg/time_integrator.hpp"

#include "wadg/errors.hpp"
#include "wadg/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace wadg {

const LsrkTableau& lsrk45() {
  static const LsrkTableau tab = {
      {{0.0, -567301805773.0 / 1357537059087.0,
        -2404267990393.0 / 2016746695238.0, -3550918686646.0 / 2091501179385.0,
        -1275806237668.0 / 842570457699.0}},
      {{1432997174477.0 / 9575080441755.0, 5161836677717.0 / 13612068292357.0,
        1720146321549.0 / 2090206949498.0, 3134564353537.0 / 4481467310338.0,
        2277821191437.0 / 14882151754819.0}},
      {{0.0, 1432997174477.0 / 9575080441755.0,
        2526269341429.0 / 6820363962896.0, 2006345519317.0 / 3224310063776.0,
        2802321613138.0 / 2924317926251.0}},
  };
  return tab;
}

double trace_constant(int N, TraceConstant mode) {
  switch (mode) {
    case TraceConstant::squared:
      return static_cast<double>((N + 1) * (N + 1));
    case TraceConstant::simplex:
    default:
      return 0.5 * (N + 1) * (N + 2);
  }
}

double stable_dt(const ReferenceElement& re, const Geometry& geo,
                 const MaterialField& mat, double cfl, TraceConstant mode) {
  if (!(cfl > 0)) throw invalid_input("time: cfl must be positive");
  double csup = 0;
  const std::size_t n = static_cast<std::size_t>(mat.K) * mat.Nq;
  for (std::size_t i = 0; i < n; ++i)
    csup = std::max(csup, sym3_max_eig(mat.at(i)));
  const double cn = trace_constant(re.N, mode);
  const int Nq = geo.Nq, Nfq3 = 3 * geo.Nfq;
  double dt = std::numeric_limits<double>::infinity();
  for (int k = 0; k < geo.K; ++k) {
    double jf = 0, jinv = 0;
    for (int j = 0; j < Nfq3; ++j)
      jf = std::max(jf, geo.Jf[static_cast<std::size_t>(k) * Nfq3 + j]);
    for (int q = 0; q < Nq; ++q)
      jinv = std::max(jinv, 1.0 / geo.J[static_cast<std::size_t>(k) * Nq + q]);
    dt = std::min(dt, cfl / (csup * cn * jf * jinv));
  }
  return dt;
}

void integrate_steps(const RhsFn& rhs, State& u, double t0, double dt,
                     std::int64_t nsteps, const Observer& obs) {
  State res, du;
  res.resize(u.K, u.Np);
  du.resize(u.K, u.Np);
  const LsrkTableau& tab = lsrk45();
  const std::size_t n = u.u.size();
  if (obs) obs({0, nsteps, t0, dt}, u);
  for (std::int64_t step = 0; step < nsteps; ++step) {
    const double t = t0 + static_cast<double>(step) * dt;
    for (int stage = 0; stage < 5; ++stage) {
      rhs(t + tab.c[stage] * dt, u, du);
      kernels::lsrk_update(n, tab.a[stage], dt, tab.b[stage], res.u.data(),
                           du.u.data(), u.u.data());
    }
    for (std::size_t i = 0; i < n; ++i)
      if (!std::isfinite(u.u[i]))
        throw runtime_failure("time: solution diverged at step " +
                              std::to_string(step + 1) + " of " +
                              std::to_string(nsteps));
    if (obs) obs({step + 1, nsteps, t0 + static_cast<double>(step + 1) * dt, dt},
                 u);
  }
}

IntegrateResult integrate(const DgOperator& op, State& u,
                          const TimeConfig& cfg, const Observer& obs) {
  if (cfg.t_final < 0) throw invalid_input("time: t_final must be >= 0");
  IntegrateResult out;
  if (cfg.t_final == 0) {
    out.dt = 0;
    out.nsteps = 0;
    if (obs) obs({0, 0, 0.0, 0.0}, u);
    return out;
  }
  const double dt0 =
      stable_dt(op.ref(), op.geometry(), op.material(), cfg.cfl,
                cfg.trace_constant);
  out.nsteps = static_cast<std::int64_t>(std::ceil(cfg.t_final / dt0));
  if (out.nsteps < 1) out.nsteps = 1;
  out.dt = cfg.t_final / static_cast<double>(out.nsteps);
  integrate_steps(
      [&op](double t, const State& a, State& b) { op.rhs(t, a, b); }, u, 0.0,
      out.dt, out.nsteps, obs);
  return out;
}

} // namespace wadg
