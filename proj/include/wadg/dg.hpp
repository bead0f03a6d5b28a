#pragma once

// Semi-discrete DG operator for the symmetric velocity-stress form of linear
// elastodynamics in 2D,
//   rho dv/dt   = A1^T dsigma/dx + A2^T dsigma/dy + f,
//   C^-1 dsigma/dt = A1 dv/dx + A2 dv/dy,
// with fields ordered (v1, v2, sxx, syy, sxy) and stress in Voigt form with
// engineering shear. Interface coupling uses jump penalty fluxes; material
// coefficients enter only through the weight-adjusted mass inverses applied
// after the residual is assembled, so the residual itself is material-free.
//
// Two volume treatments are provided. The strong form differentiates the
// trace arguments directly and is used on affine meshes, where quadrature of
// degree 2N+1 makes discrete integration by parts exact. The skew form
// integrates the stress-equation volume term by parts (its surface term then
// carries A_n times the velocity average rather than the jump), which keeps
// the semi-discrete energy estimate intact when the geometric factors vary
// inside an element, i.e. on curvilinear meshes.

#include "wadg/kernels.hpp"
#include "wadg/materials.hpp"
#include "wadg/mesh.hpp"
#include "wadg/ref_element.hpp"
#include "wadg/thread_pool.hpp"
#include "wadg/wadg_ops.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

namespace wadg {

inline constexpr int kFields = 5; // v1 v2 sxx syy sxy

// Modal coefficients, field-major per element: u[(k*kFields + f)*Np + m].
struct State {
  int K = 0;
  int Np = 0;
  std::vector<double> u;

  void resize(int K_, int Np_) {
    K = K_;
    Np = Np_;
    u.assign(static_cast<std::size_t>(K) * kFields * Np, 0.0);
  }
  double* field(int k, int f) {
    return u.data() + (static_cast<std::size_t>(k) * kFields + f) * Np;
  }
  const double* field(int k, int f) const {
    return u.data() + (static_cast<std::size_t>(k) * kFields + f) * Np;
  }
};

enum class FluxMode { central, penalty, scaled };

struct FluxSpec {
  FluxMode mode = FluxMode::penalty;
  // Used directly when mode == penalty.
  double tau_v = 1.0;
  double tau_sigma = 1.0;
  // Used when mode == scaled: per face, tau_v = gamma_v * s_f and
  // tau_sigma = gamma_sigma / s_f with s_f = sup sqrt(|C|_2 rho) over the
  // volume quadrature points of the two adjacent elements. This keeps both
  // penalty terms commensurate with the local impedance.
  double gamma_v = 1.0;
  double gamma_sigma = 1.0;
};

enum class BcKind { traction, velocity, absorbing };

// Prescribed boundary data: traction (tx, ty) or velocity (vx, vy) depending
// on the condition kind. A null function means homogeneous data.
using BcDataFn = std::function<void(double x, double y, double t, double out[2])>;

struct BoundaryCondition {
  BcKind kind = BcKind::traction;
  BcDataFn data;
};

double ricker(double t, double f0, double t0);

enum class SourceKind { none, ricker_point, ricker_smoothed };

struct SourceSpec {
  SourceKind kind = SourceKind::none;
  double x0 = 0, y0 = 0;
  double f0 = 1;  // Ricker central frequency
  double t0 = 0;  // Ricker delay
  double radius = 0.1; // Gaussian mollifier width for ricker_smoothed
  std::array<double, 2> amp = {0.0, 1.0}; // velocity components per unit wavelet

  // Optional stress forcing evaluated at volume quadrature points and added
  // after the stiffness weight, i.e. f such that dsigma/dt = C A v + f.
  std::function<void(double x, double y, double t, double out[3])> stress;
};

enum class VolumeMode { automatic, strong, skew };

struct DgOptions {
  FluxSpec flux;
  std::array<BoundaryCondition, 4> bc; // indexed by mesh Side
  SourceSpec source;
  VolumeMode volume = VolumeMode::automatic;
  // Drops boundary data and sources so the operator is linear in the state;
  // used when assembling the operator matrix.
  bool homogeneous = false;
};

class DgOperator {
 public:
  // The pool may be null for serial evaluation. All inputs are copied except
  // the pool, which must outlive the operator.
  DgOperator(const ReferenceElement& re, const Mesh& mesh,
             const CoordinateMap& coords, const Geometry& geo,
             const MaterialField& mat, DgOptions opts,
             ThreadPool* pool = nullptr);

  // du = spatial operator applied to u at time t, including the
  // weight-adjusted mass inverses. Uses per-thread scratch; a single
  // evaluation at a time.
  void rhs(double t, const State& u, State& du) const;
  void rhs_strong(double t, const State& u, State& du) const;
  void rhs_skew(double t, const State& u, State& du) const;

  int K() const { return mesh_.K; }
  int Np() const { return re_.Np; }
  int ndof() const { return mesh_.K * kFields * re_.Np; }

  const ReferenceElement& ref() const { return re_; }
  const Mesh& mesh() const { return mesh_; }
  const Geometry& geometry() const { return geo_; }
  const MaterialField& material() const { return mat_; }
  const DgOptions& options() const { return opts_; }

  // Resolved per-face penalties, K x 3 each.
  const std::vector<double>& tau_v_face() const { return tau_v_face_; }
  const std::vector<double>& tau_sigma_face() const { return tau_sigma_face_; }

  // sup over all volume quadrature points of sqrt(max_eig(C) / rho), an
  // upper bound on the fastest wave speed in the medium.
  double max_wave_speed() const;
  // sup over all volume quadrature points of the stiffness spectral norm.
  double max_stiffness_norm() const;

 private:
  struct Scratch {
    std::vector<double> r;      // kFields x Np residual
    std::vector<double> flux;   // kFields x 3Nfq flux planes
    std::vector<double> p;      // kFields x Nq quadrature accumulation planes
    std::vector<double> ur, us; // Nq derivative scratch
    std::vector<double> a, b;   // general scratch
    std::vector<double> src;    // 3 x Nq stress source values
    WadgWork wadg;
  };

  void element_residual_strong(int k, double t, const State& u,
                               Scratch& s) const;
  void element_residual_skew(int k, double t, const State& u,
                             Scratch& s) const;
  void surface_residual(int k, double t, bool skew, Scratch& s) const;
  void apply_sources_and_mass(int k, double t, Scratch& s, State& du) const;
  void gather_traces(const State& u) const;
  void run_elements(const std::function<void(int thread, int k)>& fn) const;

  ReferenceElement re_;
  Mesh mesh_;
  Geometry geo_;
  MaterialField mat_;
  DgOptions opts_;
  ThreadPool* pool_ = nullptr;
  bool use_skew_ = false;

  // Transposed operator matrices for residual accumulation.
  std::vector<double> VqT_, VrqT_, VsqT_; // Np x Nq
  std::vector<double> Vf_all_;            // 3Nfq x Np (stacked face traces)
  std::vector<double> VfT_;               // Np x 3Nfq

  // Weight-adjusted mass weights, K x Nq planes.
  std::vector<double> wv_;                  // 1 / (rho J)
  std::array<std::vector<double>, 6> wC_;   // C / J, Voigt plane order
  // Quadrature x Jacobian volume planes, K x Nq.
  std::vector<double> wJ_;                        // w_q J
  std::vector<double> wJrx_, wJry_, wJsx_, wJsy_; // w_q J {rx,ry,sx,sy}
  // w_f Jf per face point, K x 3Nfq.
  std::vector<double> wfJf_;

  // Trace exchange: flat index of the neighbor's matching face point in the
  // trace buffer, or -1 on a physical boundary.
  std::vector<std::int32_t> ext_index_;
  // Trace values, (K * 3Nfq) x kFields, field-innermost.
  mutable std::vector<double> uf_;

  std::vector<double> tau_v_face_, tau_sigma_face_; // K x 3

  // Point source placement.
  int src_elem_ = -1;
  std::vector<double> src_phi_;  // basis at the source point
  // Smoothed source: VqT (wJ mollifier) per element, K x Np.
  std::vector<double> src_proj_;

  mutable std::vector<Scratch> scratch_;
};

} // namespace wadg
