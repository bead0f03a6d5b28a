#include "wadg/ref_element.hpp"

#include "wadg/errors.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>

namespace wadg {

namespace {

// Orthonormal Jacobi polynomials P_n^(alpha,beta) on [-1,1] with respect to
// the weight (1-x)^alpha (1+x)^beta, by the standard three-term recurrence.
// Fills P[0..n] at a single point x.
void jacobi_upto(double x, double alpha, double beta, int n, double* P) {
  const double ab = alpha + beta;
  double gamma0 = std::pow(2.0, ab + 1.0) / (ab + 1.0) *
                  std::tgamma(alpha + 1.0) * std::tgamma(beta + 1.0) /
                  std::tgamma(ab + 1.0);
  P[0] = 1.0 / std::sqrt(gamma0);
  if (n == 0) return;
  double gamma1 = (alpha + 1.0) * (beta + 1.0) / (ab + 3.0) * gamma0;
  P[1] = ((ab + 2.0) * x / 2.0 + (alpha - beta) / 2.0) / std::sqrt(gamma1);
  if (n == 1) return;
  double aold = 2.0 / (2.0 + ab) *
                std::sqrt((alpha + 1.0) * (beta + 1.0) / (ab + 3.0));
  for (int i = 1; i < n; ++i) {
    const double h1 = 2.0 * i + ab;
    const double anew =
        2.0 / (h1 + 2.0) *
        std::sqrt((i + 1.0) * (i + 1.0 + ab) * (i + 1.0 + alpha) *
                  (i + 1.0 + beta) / ((h1 + 1.0) * (h1 + 3.0)));
    const double bnew = -(alpha * alpha - beta * beta) / (h1 * (h1 + 2.0));
    P[i + 1] = ((x - bnew) * P[i] - aold * P[i - 1]) / anew;
    aold = anew;
  }
}

double jacobi_p(double x, double alpha, double beta, int n) {
  double buf[kMaxDegree + 2];
  jacobi_upto(x, alpha, beta, n, buf);
  return buf[n];
}

// d/dx of the orthonormal Jacobi polynomial.
double grad_jacobi_p(double x, double alpha, double beta, int n) {
  if (n == 0) return 0.0;
  return std::sqrt(n * (n + alpha + beta + 1.0)) *
         jacobi_p(x, alpha + 1.0, beta + 1.0, n - 1);
}

// Collapsed coordinates: a in [-1,1] along the bottom, b = s.
inline void collapse(double r, double s, double& a, double& b) {
  b = s;
  a = (std::abs(1.0 - s) > 1e-14) ? 2.0 * (1.0 + r) / (1.0 - s) - 1.0 : -1.0;
}

} // namespace

Quadrature1D gauss_jacobi(int n, double alpha, double beta) {
  if (n < 1) throw invalid_input("gauss_jacobi: need at least one point");
  const double ab = alpha + beta;
  const double mu0 = std::pow(2.0, ab + 1.0) * std::tgamma(alpha + 1.0) *
                     std::tgamma(beta + 1.0) / std::tgamma(ab + 2.0);
  Quadrature1D q;
  q.x.resize(n);
  q.w.resize(n);
  if (n == 1) {
    q.x[0] = (beta - alpha) / (ab + 2.0);
    q.w[0] = mu0;
    return q;
  }
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  J(0, 0) = (beta - alpha) / (ab + 2.0);
  for (int k = 1; k < n; ++k) {
    const double h = 2.0 * k + ab;
    J(k, k) = (beta * beta - alpha * alpha) / (h * (h + 2.0));
    const double b2 = 4.0 * k * (k + alpha) * (k + beta) * (k + ab) /
                      (h * h * (h + 1.0) * (h - 1.0));
    J(k, k - 1) = J(k - 1, k) = std::sqrt(b2);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  for (int k = 0; k < n; ++k) {
    q.x[k] = es.eigenvalues()(k);
    const double v0 = es.eigenvectors()(0, k);
    q.w[k] = mu0 * v0 * v0;
  }
  return q;
}

TriangleQuadrature triangle_quadrature(int degree) {
  if (degree < 0) throw invalid_input("triangle_quadrature: negative degree");
  // n-point Gauss rules are exact through 2n-1 in each collapsed direction;
  // the (1-b) collapse Jacobian is absorbed by the Jacobi(1,0) weight.
  const int n1d = degree / 2 + 1;
  const Quadrature1D qa = gauss_jacobi(n1d, 0.0, 0.0);
  const Quadrature1D qb = gauss_jacobi(n1d, 1.0, 0.0);
  TriangleQuadrature q;
  q.r.reserve(static_cast<std::size_t>(n1d) * n1d);
  q.s.reserve(q.r.capacity());
  q.w.reserve(q.r.capacity());
  for (int ib = 0; ib < n1d; ++ib) {
    for (int ia = 0; ia < n1d; ++ia) {
      const double a = qa.x[ia], b = qb.x[ib];
      q.r.push_back(0.5 * (1.0 + a) * (1.0 - b) - 1.0);
      q.s.push_back(b);
      q.w.push_back(0.5 * qa.w[ia] * qb.w[ib]);
    }
  }
  return q;
}

void basis_eval(int N, std::size_t npts, const double* r, const double* s,
                double* V) {
  const int Np = (N + 1) * (N + 2) / 2;
  double fa[kMaxDegree + 1];
  double gb[kMaxDegree + 1];
  for (std::size_t p = 0; p < npts; ++p) {
    double a, b;
    collapse(r[p], s[p], a, b);
    jacobi_upto(a, 0.0, 0.0, N, fa);
    double* row = V + p * Np;
    int col = 0;
    for (int i = 0; i <= N; ++i) {
      jacobi_upto(b, 2.0 * i + 1.0, 0.0, N - i, gb);
      const double scale =
          std::pow(2.0, i + 0.5) * std::pow(0.5 * (1.0 - b), i);
      for (int j = 0; j <= N - i; ++j) row[col++] = scale * fa[i] * gb[j];
    }
    (void)col;
  }
}

void basis_grad_eval(int N, std::size_t npts, const double* r, const double* s,
                     double* Vr, double* Vs) {
  const int Np = (N + 1) * (N + 2) / 2;
  for (std::size_t p = 0; p < npts; ++p) {
    double a, b;
    collapse(r[p], s[p], a, b);
    double* rowr = Vr + p * Np;
    double* rows = Vs + p * Np;
    int col = 0;
    for (int i = 0; i <= N; ++i) {
      const double fa = jacobi_p(a, 0.0, 0.0, i);
      const double dfa = grad_jacobi_p(a, 0.0, 0.0, i);
      const double hb = 0.5 * (1.0 - b);
      const double hbi = std::pow(hb, i);
      const double hbim1 = (i > 0) ? std::pow(hb, i - 1) : 0.0;
      const double norm = std::pow(2.0, i + 0.5);
      for (int j = 0; j <= N - i; ++j) {
        const double gb = jacobi_p(b, 2.0 * i + 1.0, 0.0, j);
        const double dgb = grad_jacobi_p(b, 2.0 * i + 1.0, 0.0, j);
        // Chain rule through the collapsed map: da/dr = 2/(1-b),
        // da/ds = (1+a)/(1-b), db/ds = 1. The (1-b) powers keep everything
        // finite at the collapsed vertex.
        double dr = dfa * gb * ((i > 0) ? hbim1 : 1.0);
        double ds = dfa * gb * 0.5 * (1.0 + a) * ((i > 0) ? hbim1 : 1.0);
        double tmp = dgb * hbi;
        if (i > 0) tmp -= 0.5 * i * gb * hbim1;
        ds += fa * tmp;
        rowr[col] = norm * dr;
        rows[col] = norm * ds;
        ++col;
      }
    }
  }
}

double reference_triangle_monomial_integral(int i, int j) {
  // Inner integral over s in [-1,-r] in closed form; even 1D moments only.
  auto line = [](int k) { return (k % 2 == 0) ? 2.0 / (k + 1.0) : 0.0; };
  const double sign = (j % 2 == 0) ? -1.0 : 1.0; // (-1)^(j+1)
  return sign / (j + 1.0) * (line(i + j + 1) - line(i));
}

ReferenceElement build_reference_element(int N, int quad_degree) {
  if (N < 1 || N > kMaxDegree)
    throw invalid_input("build_reference_element: degree must be in [1,7]");
  if (quad_degree < 0) quad_degree = 2 * N + 1;
  if (quad_degree < 2 * N)
    throw invalid_input("build_reference_element: quadrature must be exact "
                        "through at least degree 2N");

  ReferenceElement re;
  re.N = N;
  re.Np = (N + 1) * (N + 2) / 2;
  re.volq = triangle_quadrature(quad_degree);
  re.Nq = static_cast<int>(re.volq.w.size());
  const int Np = re.Np, Nq = re.Nq;

  re.Vq.resize(static_cast<std::size_t>(Nq) * Np);
  re.Vrq.resize(re.Vq.size());
  re.Vsq.resize(re.Vq.size());
  basis_eval(N, Nq, re.volq.r.data(), re.volq.s.data(), re.Vq.data());
  basis_grad_eval(N, Nq, re.volq.r.data(), re.volq.s.data(), re.Vrq.data(),
                  re.Vsq.data());

  using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  Eigen::Map<const Mat> Vq(re.Vq.data(), Nq, Np);
  Eigen::Map<const Mat> Vrq(re.Vrq.data(), Nq, Np);
  Eigen::Map<const Mat> Vsq(re.Vsq.data(), Nq, Np);
  Eigen::Map<const Eigen::VectorXd> wq(re.volq.w.data(), Nq);

  Mat M = Vq.transpose() * wq.asDiagonal() * Vq;
  Mat Minv = M.inverse();
  Mat Pq = Minv * Vq.transpose() * wq.asDiagonal();
  Mat Sr = Vq.transpose() * wq.asDiagonal() * Vrq;
  Mat Ss = Vq.transpose() * wq.asDiagonal() * Vsq;
  re.M.assign(M.data(), M.data() + M.size());
  re.Minv.assign(Minv.data(), Minv.data() + Minv.size());
  re.Pq.assign(Pq.data(), Pq.data() + Pq.size());
  re.Sr.assign(Sr.data(), Sr.data() + Sr.size());
  re.Ss.assign(Ss.data(), Ss.data() + Ss.size());

  // Face quadrature: N+1 Gauss points per face, exact through 2N+1 on traces.
  re.faceq = gauss_jacobi(N + 1, 0.0, 0.0);
  re.Nfq = N + 1;
  const int Nfq = re.Nfq;
  // Counterclockwise face parameterizations in (r,s).
  const double fv[3][2][2] = {{{-1, -1}, {1, -1}},
                              {{1, -1}, {-1, 1}},
                              {{-1, 1}, {-1, -1}}};
  for (int f = 0; f < 3; ++f) {
    auto& fr = re.face_r[f];
    auto& fs = re.face_s[f];
    fr.resize(Nfq);
    fs.resize(Nfq);
    for (int q = 0; q < Nfq; ++q) {
      const double t = re.faceq.x[q];
      fr[q] = 0.5 * (1.0 - t) * fv[f][0][0] + 0.5 * (1.0 + t) * fv[f][1][0];
      fs[q] = 0.5 * (1.0 - t) * fv[f][0][1] + 0.5 * (1.0 + t) * fv[f][1][1];
    }
    re.Vf[f].resize(static_cast<std::size_t>(Nfq) * Np);
    re.Vfr[f].resize(re.Vf[f].size());
    re.Vfs[f].resize(re.Vf[f].size());
    basis_eval(N, Nfq, fr.data(), fs.data(), re.Vf[f].data());
    basis_grad_eval(N, Nfq, fr.data(), fs.data(), re.Vfr[f].data(),
                    re.Vfs[f].data());
    Eigen::Map<const Mat> Vf(re.Vf[f].data(), Nfq, Np);
    Eigen::Map<const Eigen::VectorXd> wf(re.faceq.w.data(), Nfq);
    Mat Lf = Minv * Vf.transpose() * wf.asDiagonal();
    re.Lf[f].assign(Lf.data(), Lf.data() + Lf.size());
  }

  // Equispaced barycentric nodes, i-major; N+1 nodes on each edge.
  re.node_r.reserve(Np);
  re.node_s.reserve(Np);
  for (int i = 0; i <= N; ++i) {
    for (int j = 0; j <= N - i; ++j) {
      re.node_r.push_back(-1.0 + 2.0 * i / N);
      re.node_s.push_back(-1.0 + 2.0 * j / N);
    }
  }
  re.Vnode.resize(static_cast<std::size_t>(Np) * Np);
  basis_eval(N, Np, re.node_r.data(), re.node_s.data(), re.Vnode.data());
  Eigen::Map<const Mat> Vn(re.Vnode.data(), Np, Np);
  Mat Vninv = Vn.fullPivLu().inverse();
  re.nodal_to_modal.assign(Vninv.data(), Vninv.data() + Vninv.size());

  return re;
}

} // namespace wadg
