#pragma once

// Explicit time integration with the five-stage fourth-order low-storage
// Runge-Kutta scheme of Carpenter and Kennedy, plus the global timestep
// bound
//   dt = min_k cfl / (sup_x |C(x)|_2 * C_N * |Jf|_{inf, dDk} * |1/J|_{inf, Dk})
// where C_N is the degree-dependent constant of the surface polynomial trace
// inequality on the reference triangle. The bound follows from estimating
// the spectral radius of the spatial operator and is deliberately
// conservative.

#include "wadg/dg.hpp"

#include <array>
#include <cstdint>
#include <functional>

namespace wadg {

struct LsrkTableau {
  std::array<double, 5> a, b, c;
};

// Carpenter-Kennedy LSRK4(5) coefficients.
const LsrkTableau& lsrk45();

enum class TraceConstant {
  simplex, // (N+1)(N+2)/2, sharp for degree-N polynomials on a triangle
  squared, // (N+1)^2, a cruder bound; smaller timesteps
};

double trace_constant(int N, TraceConstant mode);

// Timestep from the bound above; material enters through the sup over all
// volume quadrature points of the stiffness spectral norm.
double stable_dt(const ReferenceElement& re, const Geometry& geo,
                 const MaterialField& mat, double cfl,
                 TraceConstant mode = TraceConstant::simplex);

struct TimeConfig {
  double cfl = 1.0;
  double t_final = 0.0;
  TraceConstant trace_constant = TraceConstant::simplex;
};

struct StepInfo {
  std::int64_t step = 0;   // completed steps so far
  std::int64_t nsteps = 0; // total steps planned
  double t = 0;            // time after this step
  double dt = 0;
};

// Called once before the first step (step = 0) and after every step.
using Observer = std::function<void(const StepInfo&, const State&)>;

using RhsFn = std::function<void(double t, const State& u, State& du)>;

// Fixed-step LSRK4(5) loop over an arbitrary right-hand side. Throws
// runtime_failure naming the failing step if the state stops being finite.
void integrate_steps(const RhsFn& rhs, State& u, double t0, double dt,
                     std::int64_t nsteps, const Observer& obs = {});

struct IntegrateResult {
  double dt = 0;
  std::int64_t nsteps = 0;
};

// Advances u from t = 0 to cfg.t_final. The stable timestep is truncated so
// an integer number of steps lands exactly on t_final.
IntegrateResult integrate(const DgOperator& op, State& u,
                          const TimeConfig& cfg, const Observer& obs = {});

} // namespace wadg
