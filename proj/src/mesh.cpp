#include "wadg/mesh.hpp"

#include "wadg/errors.hpp"
#include "wadg/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <ostream>
#include <utility>

namespace wadg {

namespace {

// Reference face parameter derivatives d(r,s)/dxi for the counterclockwise
// parameterizations declared with the reference element.
constexpr double kFaceDir[3][2] = {{1.0, 0.0}, {-1.0, 1.0}, {0.0, -1.0}};

} // namespace

Mesh uniform_tri_mesh(int nx, int ny, double x0, double x1, double y0,
                      double y1, Periodic periodic) {
  if (nx < 1 || ny < 1) throw invalid_input("uniform_tri_mesh: empty grid");
  if (!(x1 > x0) || !(y1 > y0))
    throw invalid_input("uniform_tri_mesh: degenerate rectangle");
  Mesh m;
  m.nx = nx;
  m.ny = ny;
  m.x0 = x0;
  m.x1 = x1;
  m.y0 = y0;
  m.y1 = y1;
  m.periodic = periodic;
  m.verts.reserve(static_cast<std::size_t>(nx + 1) * (ny + 1));
  for (int j = 0; j <= ny; ++j) {
    for (int i = 0; i <= nx; ++i) {
      m.verts.push_back({x0 + (x1 - x0) * i / nx, y0 + (y1 - y0) * j / ny});
    }
  }
  m.K = 2 * nx * ny;
  m.tris.reserve(m.K);
  const auto vid = [nx](int i, int j) { return j * (nx + 1) + i; };
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const int v00 = vid(i, j), v10 = vid(i + 1, j);
      const int v01 = vid(i, j + 1), v11 = vid(i + 1, j + 1);
      // Alternate the bisection diagonal per quad so the triangulation has no
      // preferred direction; a fixed diagonal skews dispersion along it.
      if ((i + j) % 2 == 0) {
        m.tris.push_back({v00, v10, v11});
        m.tris.push_back({v00, v11, v01});
      } else {
        m.tris.push_back({v00, v10, v01});
        m.tris.push_back({v10, v11, v01});
      }
    }
  }
  connect(m);
  return m;
}

void connect(Mesh& mesh) {
  const int K = mesh.K;
  mesh.etoe.assign(K, {-1, -1, -1});
  mesh.etof.assign(K, {-1, -1, -1});
  mesh.bside.assign(K, {-1, -1, -1});
  mesh.face_shift.assign(K, {{{0.0, 0.0}, {0.0, 0.0}, {0.0, 0.0}}});

  // Periodic sides are matched by folding the structured grid indices of the
  // max side onto the min side before keying faces by vertex pairs.
  const int nx = mesh.nx, ny = mesh.ny;
  const auto canon = [&](int v) {
    int i = v % (nx + 1), j = v / (nx + 1);
    if (mesh.periodic.x && i == nx) i = 0;
    if (mesh.periodic.y && j == ny) j = 0;
    return j * (nx + 1) + i;
  };

  std::map<std::pair<int, int>, std::pair<int, int>> open_faces;
  for (int k = 0; k < K; ++k) {
    for (int f = 0; f < 3; ++f) {
      const int a = canon(mesh.tris[k][f]);
      const int b = canon(mesh.tris[k][(f + 1) % 3]);
      const auto key = std::minmax(a, b);
      auto it = open_faces.find(key);
      if (it == open_faces.end()) {
        open_faces.emplace(key, std::make_pair(k, f));
        continue;
      }
      const auto [k2, f2] = it->second;
      open_faces.erase(it);
      mesh.etoe[k][f] = k2;
      mesh.etof[k][f] = f2;
      mesh.etoe[k2][f2] = k;
      mesh.etof[k2][f2] = f;
      // Translation carrying this face's coordinates onto the neighbor's.
      const auto mid = [&](int kk, int ff) {
        const auto& p = mesh.verts[mesh.tris[kk][ff]];
        const auto& q = mesh.verts[mesh.tris[kk][(ff + 1) % 3]];
        return std::array<double, 2>{0.5 * (p[0] + q[0]), 0.5 * (p[1] + q[1])};
      };
      const auto m1 = mid(k, f), m2 = mid(k2, f2);
      mesh.face_shift[k][f] = {m2[0] - m1[0], m2[1] - m1[1]};
      mesh.face_shift[k2][f2] = {m1[0] - m2[0], m1[1] - m2[1]};
    }
  }

  const double tol = 1e-10 * std::max(mesh.x1 - mesh.x0, mesh.y1 - mesh.y0);
  for (int k = 0; k < K; ++k) {
    for (int f = 0; f < 3; ++f) {
      if (mesh.etoe[k][f] >= 0) continue;
      const auto& a = mesh.verts[mesh.tris[k][f]];
      const auto& b = mesh.verts[mesh.tris[k][(f + 1) % 3]];
      int side = -1;
      if (std::abs(a[0] - mesh.x0) < tol && std::abs(b[0] - mesh.x0) < tol)
        side = side_xmin;
      else if (std::abs(a[0] - mesh.x1) < tol && std::abs(b[0] - mesh.x1) < tol)
        side = side_xmax;
      else if (std::abs(a[1] - mesh.y0) < tol && std::abs(b[1] - mesh.y0) < tol)
        side = side_ymin;
      else if (std::abs(a[1] - mesh.y1) < tol && std::abs(b[1] - mesh.y1) < tol)
        side = side_ymax;
      if (side < 0)
        throw invalid_input("connect: unmatched interior face");
      mesh.bside[k][f] = side;
    }
  }
}

namespace {

CoordinateMap coordinates_from_nodal(const Mesh& mesh,
                                     const ReferenceElement& re,
                                     bool warped) {
  CoordinateMap cm;
  cm.Np = re.Np;
  const int K = mesh.K, Np = re.Np;
  cm.x.resize(static_cast<std::size_t>(K) * Np);
  cm.y.resize(cm.x.size());
  cm.affine.assign(K, warped ? 0 : 1);
  std::vector<double> nodal_x(Np), nodal_y(Np);
  for (int k = 0; k < K; ++k) {
    const auto& v1 = mesh.verts[mesh.tris[k][0]];
    const auto& v2 = mesh.verts[mesh.tris[k][1]];
    const auto& v3 = mesh.verts[mesh.tris[k][2]];
    for (int n = 0; n < Np; ++n) {
      const double r = re.node_r[n], s = re.node_s[n];
      const double l1 = -0.5 * (r + s), l2 = 0.5 * (1.0 + r),
                   l3 = 0.5 * (1.0 + s);
      double x = l1 * v1[0] + l2 * v2[0] + l3 * v3[0];
      double y = l1 * v1[1] + l2 * v2[1] + l3 * v3[1];
      // Nodes on the domain boundary stay fixed so the warped mesh fills the
      // same rectangle and boundary faces remain straight; shared edge nodes
      // see one consistent rule, keeping the mesh watertight.
      const double btol =
          1e-12 * std::max(mesh.x1 - mesh.x0, mesh.y1 - mesh.y0);
      const bool on_boundary =
          std::abs(x - mesh.x0) < btol || std::abs(x - mesh.x1) < btol ||
          std::abs(y - mesh.y0) < btol || std::abs(y - mesh.y1) < btol;
      if (warped && !on_boundary) {
        const auto w = lamb_warp(x, y);
        x = w[0];
        y = w[1];
      }
      nodal_x[n] = x;
      nodal_y[n] = y;
    }
    kernels::gemv(Np, Np, re.nodal_to_modal.data(), nodal_x.data(),
                  cm.x.data() + static_cast<std::size_t>(k) * Np);
    kernels::gemv(Np, Np, re.nodal_to_modal.data(), nodal_y.data(),
                  cm.y.data() + static_cast<std::size_t>(k) * Np);
  }
  return cm;
}

} // namespace

CoordinateMap affine_coordinates(const Mesh& mesh, const ReferenceElement& re) {
  return coordinates_from_nodal(mesh, re, false);
}

std::array<double, 2> lamb_warp(double x, double y) {
  const double pi = 3.14159265358979323846;
  return {x + 0.1 * std::cos(0.5 * pi * x) * std::cos(3.0 * pi * y),
          y + 0.05 * std::sin(pi * x) * std::cos(3.0 * pi * y)};
}

CoordinateMap warp_lamb_mesh(const Mesh& mesh, const ReferenceElement& re) {
  return coordinates_from_nodal(mesh, re, true);
}

Geometry geometric_factors(const Mesh& mesh, const ReferenceElement& re,
                           const CoordinateMap& coords) {
  const int K = mesh.K, Np = re.Np, Nq = re.Nq, Nfq = re.Nfq;
  if (static_cast<int>(coords.x.size()) != K * Np)
    throw invalid_input("geometric_factors: coordinate map size mismatch");

  Geometry g;
  g.K = K;
  g.Nq = Nq;
  g.Nfq = Nfq;
  g.affine = coords.affine;
  g.curvilinear =
      std::any_of(g.affine.begin(), g.affine.end(), [](auto a) { return !a; });
  const std::size_t nv = static_cast<std::size_t>(K) * Nq;
  g.xq.resize(nv);
  g.yq.resize(nv);
  g.rx.resize(nv);
  g.ry.resize(nv);
  g.sx.resize(nv);
  g.sy.resize(nv);
  g.J.resize(nv);
  const std::size_t nf = static_cast<std::size_t>(K) * 3 * Nfq;
  g.xf.resize(nf);
  g.yf.resize(nf);
  g.nx.resize(nf);
  g.ny.resize(nf);
  g.Jf.resize(nf);

  std::vector<double> dxdr(Nq), dxds(Nq), dydr(Nq), dyds(Nq);
  std::vector<double> fx(Nfq), fy(Nfq), fxr(Nfq), fxs(Nfq), fyr(Nfq), fys(Nfq);
  g.minJ = std::numeric_limits<double>::max();

  for (int k = 0; k < K; ++k) {
    const double* cx = coords.x.data() + static_cast<std::size_t>(k) * Np;
    const double* cy = coords.y.data() + static_cast<std::size_t>(k) * Np;
    double* xq = g.xq.data() + static_cast<std::size_t>(k) * Nq;
    double* yq = g.yq.data() + static_cast<std::size_t>(k) * Nq;
    kernels::gemv(Nq, Np, re.Vq.data(), cx, xq);
    kernels::gemv(Nq, Np, re.Vq.data(), cy, yq);
    kernels::gemv(Nq, Np, re.Vrq.data(), cx, dxdr.data());
    kernels::gemv(Nq, Np, re.Vsq.data(), cx, dxds.data());
    kernels::gemv(Nq, Np, re.Vrq.data(), cy, dydr.data());
    kernels::gemv(Nq, Np, re.Vsq.data(), cy, dyds.data());
    if (coords.affine[k]) {
      // Derivatives of an affine map are constant; broadcast one evaluation
      // so downstream code can rely on exact constancy.
      std::fill(dxdr.begin(), dxdr.end(), dxdr[0]);
      std::fill(dxds.begin(), dxds.end(), dxds[0]);
      std::fill(dydr.begin(), dydr.end(), dydr[0]);
      std::fill(dyds.begin(), dyds.end(), dyds[0]);
    }
    for (int q = 0; q < Nq; ++q) {
      const std::size_t idx = static_cast<std::size_t>(k) * Nq + q;
      const double J = dxdr[q] * dyds[q] - dxds[q] * dydr[q];
      if (!(J > 0.0))
        throw invalid_input("geometric_factors: nonpositive Jacobian");
      g.J[idx] = J;
      g.rx[idx] = dyds[q] / J;
      g.ry[idx] = -dxds[q] / J;
      g.sx[idx] = -dydr[q] / J;
      g.sy[idx] = dxdr[q] / J;
      g.minJ = std::min(g.minJ, J);
    }
    for (int f = 0; f < 3; ++f) {
      kernels::gemv(Nfq, Np, re.Vf[f].data(), cx, fx.data());
      kernels::gemv(Nfq, Np, re.Vf[f].data(), cy, fy.data());
      kernels::gemv(Nfq, Np, re.Vfr[f].data(), cx, fxr.data());
      kernels::gemv(Nfq, Np, re.Vfs[f].data(), cx, fxs.data());
      kernels::gemv(Nfq, Np, re.Vfr[f].data(), cy, fyr.data());
      kernels::gemv(Nfq, Np, re.Vfs[f].data(), cy, fys.data());
      const double dr = kFaceDir[f][0], ds = kFaceDir[f][1];
      for (int q = 0; q < Nfq; ++q) {
        const std::size_t idx =
            (static_cast<std::size_t>(k) * 3 + f) * Nfq + q;
        g.xf[idx] = fx[q];
        g.yf[idx] = fy[q];
        const double tx = fxr[q] * dr + fxs[q] * ds;
        const double ty = fyr[q] * dr + fys[q] * ds;
        const double len = std::hypot(tx, ty);
        if (!(len > 0.0))
          throw invalid_input("geometric_factors: degenerate face");
        g.Jf[idx] = len;
        // Counterclockwise traversal puts the outward normal at -90 degrees
        // from the tangent.
        g.nx[idx] = ty / len;
        g.ny[idx] = -tx / len;
      }
    }
  }
  return g;
}

void dump_mesh(const Mesh& mesh, std::ostream& os) {
  char buf[128];
  os << "wadg-mesh 1\n";
  os << "verts " << mesh.verts.size() << "\n";
  for (const auto& v : mesh.verts) {
    std::snprintf(buf, sizeof(buf), "%.17g %.17g\n", v[0], v[1]);
    os << buf;
  }
  os << "tris " << mesh.K << "\n";
  for (const auto& t : mesh.tris)
    os << t[0] << " " << t[1] << " " << t[2] << "\n";
  os << "faces " << 3 * mesh.K << "\n";
  for (int k = 0; k < mesh.K; ++k) {
    for (int f = 0; f < 3; ++f) {
      os << k << " " << f << " " << mesh.etoe[k][f] << " " << mesh.etof[k][f]
         << " " << mesh.bside[k][f] << "\n";
    }
  }
}

} // namespace wadg
