#include "wadg/analysis.hpp"

#include "wadg/errors.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <map>

namespace wadg {

namespace {

// u_h at the volume quadrature points of element k, one field at a time.
void eval_at_quad(const ReferenceElement& re, const State& u, int k, int f,
                  std::vector<double>& uq) {
  uq.resize(re.Nq);
  const double* coeff = u.u.data() + (static_cast<std::size_t>(k) * kFields + f) *
                                         static_cast<std::size_t>(re.Np);
  for (int q = 0; q < re.Nq; ++q) {
    double acc = 0;
    for (int n = 0; n < re.Np; ++n) acc += re.Vq[q * re.Np + n] * coeff[n];
    uq[q] = acc;
  }
}

double rel_or_abs(double err, double norm) {
  return norm > 0 ? err / norm : err;
}

} // namespace

ErrorRecord l2_error(const State& u, const ExactFn& exact, double t,
                     const ReferenceElement& re, const Geometry& geo,
                     double h, FluxMode flux) {
  if (!exact) throw invalid_input("error norm: no closed-form fields given");
  if (u.K != geo.K || u.Np != re.Np)
    throw invalid_input("error norm: state does not match mesh and degree");

  ErrorRecord rec;
  rec.N = re.N;
  rec.h = h;
  rec.flux = flux;

  std::array<double, kFields> err2{}, norm2{};
  std::vector<double> uq;
  std::array<std::vector<double>, kFields> uh;
  for (auto& v : uh) v.resize(re.Nq);
  double ex[kFields];
  for (int k = 0; k < geo.K; ++k) {
    for (int f = 0; f < kFields; ++f) {
      eval_at_quad(re, u, k, f, uq);
      uh[f] = uq;
    }
    const double* J = &geo.J[static_cast<std::size_t>(k) * geo.Nq];
    const double* xq = &geo.xq[static_cast<std::size_t>(k) * geo.Nq];
    const double* yq = &geo.yq[static_cast<std::size_t>(k) * geo.Nq];
    for (int q = 0; q < re.Nq; ++q) {
      exact(xq[q], yq[q], t, ex);
      const double wq = re.volq.w[q] * J[q];
      for (int f = 0; f < kFields; ++f) {
        const double d = uh[f][q] - ex[f];
        err2[f] += wq * d * d;
        norm2[f] += wq * ex[f] * ex[f];
      }
    }
  }

  double terr = 0, tnorm = 0, verr = 0, vnorm = 0, serr = 0, snorm = 0;
  for (int f = 0; f < kFields; ++f) {
    rec.field_error[f] = std::sqrt(err2[f]);
    rec.field_norm[f] = std::sqrt(norm2[f]);
    terr += err2[f];
    tnorm += norm2[f];
    if (f < 2) {
      verr += err2[f];
      vnorm += norm2[f];
    } else {
      serr += err2[f];
      snorm += norm2[f];
    }
  }
  rec.combined_abs = std::sqrt(terr);
  rec.combined_rel = rel_or_abs(std::sqrt(terr), std::sqrt(tnorm));
  rec.velocity_rel = rel_or_abs(std::sqrt(verr), std::sqrt(vnorm));
  rec.stress_rel = rel_or_abs(std::sqrt(serr), std::sqrt(snorm));
  return rec;
}

ErrorQuadrature build_error_quadrature(int N, const Mesh& mesh,
                                       const CoordinateMap& coords,
                                       int degree) {
  if (degree < 0) degree = 2 * N + 8;
  ErrorQuadrature eq;
  eq.re = build_reference_element(N, degree);
  eq.geo = geometric_factors(mesh, eq.re, coords);
  return eq;
}

double discrete_energy(const State& u, const ReferenceElement& re,
                       const Geometry& geo, const MaterialField& mat) {
  if (u.K != geo.K || u.Np != re.Np)
    throw invalid_input("energy: state does not match mesh and degree");
  double total = 0;
  std::array<std::vector<double>, kFields> uh;
  std::vector<double> uq;
  for (int k = 0; k < geo.K; ++k) {
    for (int f = 0; f < kFields; ++f) {
      eval_at_quad(re, u, k, f, uq);
      uh[f] = uq;
    }
    const double* J = &geo.J[static_cast<std::size_t>(k) * geo.Nq];
    for (int q = 0; q < re.Nq; ++q) {
      const std::size_t idx = static_cast<std::size_t>(k) * geo.Nq + q;
      const double wq = re.volq.w[q] * J[q];
      const double v1 = uh[0][q], v2 = uh[1][q];
      total += wq * mat.rho[idx] * (v1 * v1 + v2 * v2);
      Sym3 C{mat.C[0][idx], mat.C[1][idx], mat.C[2][idx],
             mat.C[3][idx], mat.C[4][idx], mat.C[5][idx]};
      if (!(sym3_min_eig(C) > 0))
        throw invalid_input("energy: stiffness not positive definite");
      const Sym3 Ci = sym3_inverse(C);
      const double s0 = uh[2][q], s1 = uh[3][q], s2 = uh[4][q];
      const double q0 = Ci.c11 * s0 + Ci.c12 * s1 + Ci.c13 * s2;
      const double q1 = Ci.c12 * s0 + Ci.c22 * s1 + Ci.c23 * s2;
      const double q2 = Ci.c13 * s0 + Ci.c23 * s1 + Ci.c33 * s2;
      total += wq * (s0 * q0 + s1 * q1 + s2 * q2);
    }
  }
  return 0.5 * total;
}

Eigen::MatrixXd assemble_operator(const DgOperator& op, int max_ndof) {
  if (!op.options().homogeneous)
    throw invalid_input(
        "operator assembly: needs a homogeneous right-hand side (no sources "
        "or boundary data)");
  const int ndof = op.ndof();
  if (ndof > max_ndof)
    throw invalid_input("operator assembly: system too large for dense form");
  Eigen::MatrixXd A(ndof, ndof);
  State e, col;
  e.resize(op.K(), op.Np());
  col.resize(op.K(), op.Np());
  for (int j = 0; j < ndof; ++j) {
    std::fill(e.u.begin(), e.u.end(), 0.0);
    e.u[j] = 1.0;
    op.rhs(0.0, e, col);
    for (int i = 0; i < ndof; ++i) A(i, j) = col.u[i];
  }
  return A;
}

SpectrumRecord spectrum(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols()) throw invalid_input("spectrum: matrix not square");
  const lapack_int n = static_cast<lapack_int>(a.rows());
  SpectrumRecord rec;
  if (n == 0) return rec;
  Eigen::MatrixXd work = a; // dgeev overwrites its input
  std::vector<double> wr(n), wi(n);
  const lapack_int info =
      LAPACKE_dgeev(LAPACK_COL_MAJOR, 'N', 'N', n, work.data(), n, wr.data(),
                    wi.data(), nullptr, 1, nullptr, 1);
  if (info < 0) throw invalid_input("spectrum: bad argument to dgeev");
  if (info > 0)
    throw runtime_failure("spectrum: QR iteration failed to converge");
  rec.eigenvalues.reserve(n);
  for (lapack_int i = 0; i < n; ++i) rec.eigenvalues.emplace_back(wr[i], wi[i]);
  std::sort(rec.eigenvalues.begin(), rec.eigenvalues.end(),
            [](const std::complex<double>& x, const std::complex<double>& y) {
              if (x.real() != y.real()) return x.real() < y.real();
              return x.imag() < y.imag();
            });
  rec.abscissa = rec.eigenvalues.back().real();
  rec.radius = 0;
  for (const auto& z : rec.eigenvalues)
    rec.radius = std::max(rec.radius, std::abs(z));
  return rec;
}

std::vector<RateSeries> convergence_rates(
    const std::vector<ErrorRecord>& recs) {
  std::vector<RateSeries> out;
  std::map<int, std::size_t> slot;
  for (const auto& r : recs) {
    if (!(r.combined_rel > 0))
      throw invalid_input("rates: errors must be positive");
    auto it = slot.find(r.N);
    if (it == slot.end()) {
      slot.emplace(r.N, out.size());
      out.push_back(RateSeries{r.N, {}, {}, {}, 0});
      it = slot.find(r.N);
    }
    RateSeries& s = out[it->second];
    s.h.push_back(r.h);
    s.error.push_back(r.combined_rel);
  }
  for (auto& s : out) {
    std::vector<std::size_t> order(s.h.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&s](std::size_t i, std::size_t j) {
      return s.h[i] > s.h[j];
    });
    std::vector<double> hh(s.h.size()), ee(s.h.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
      hh[i] = s.h[order[i]];
      ee[i] = s.error[order[i]];
    }
    s.h = hh;
    s.error = ee;
    if (s.h.size() < 2)
      throw invalid_input("rates: need at least two mesh sizes per degree");
    s.pairwise.clear();
    for (std::size_t i = 0; i + 1 < s.h.size(); ++i)
      s.pairwise.push_back(std::log(s.error[i] / s.error[i + 1]) /
                           std::log(s.h[i] / s.h[i + 1]));
    // least-squares slope of log e against log h
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double m = static_cast<double>(s.h.size());
    for (std::size_t i = 0; i < s.h.size(); ++i) {
      const double x = std::log(s.h[i]), y = std::log(s.error[i]);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    s.fitted = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  }
  return out;
}

void project_fields(const ReferenceElement& re, const Geometry& geo,
                    const InitialFn& fields, State& u) {
  if (!fields) throw invalid_input("projection: no fields given");
  u.resize(geo.K, re.Np);
  std::array<std::vector<double>, kFields> gq;
  for (auto& v : gq) v.resize(re.Nq);
  double val[kFields];
  for (int k = 0; k < geo.K; ++k) {
    const double* xq = &geo.xq[static_cast<std::size_t>(k) * geo.Nq];
    const double* yq = &geo.yq[static_cast<std::size_t>(k) * geo.Nq];
    for (int q = 0; q < re.Nq; ++q) {
      fields(xq[q], yq[q], val);
      for (int f = 0; f < kFields; ++f) gq[f][q] = val[f];
    }
    for (int f = 0; f < kFields; ++f) {
      double* coeff = u.field(k, f);
      for (int n = 0; n < re.Np; ++n) {
        double acc = 0;
        for (int q = 0; q < re.Nq; ++q)
          acc += re.Pq[n * re.Nq + q] * gq[f][q];
        coeff[n] = acc;
      }
    }
  }
}

void project_exact(const ReferenceElement& re, const Geometry& geo,
                   const ExactFn& exact, double t, State& u) {
  if (!exact) throw invalid_input("projection: no fields given");
  project_fields(
      re, geo,
      [&exact, t](double x, double y, double out[kFields]) {
        exact(x, y, t, out);
      },
      u);
}

} // namespace wadg
