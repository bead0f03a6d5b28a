#pragma once

// Triangulated rectangle meshes: uniform bisected-quad grids, face
// connectivity with optional periodic pairing, and geometric factors for
// affine and curvilinear (isoparametric) elements.

#include "wadg/ref_element.hpp"

#include <array>
#include <cstdint>
#include <iosfwd>
#include <vector>

namespace wadg {

// Geometric boundary sides of the rectangle; faces paired periodically carry
// no side tag.
enum Side { side_xmin = 0, side_xmax = 1, side_ymin = 2, side_ymax = 3 };

struct Periodic {
  bool x = false;
  bool y = false;
};

struct Mesh {
  int K = 0;
  double x0 = 0, x1 = 0, y0 = 0, y1 = 0;
  int nx = 0, ny = 0; // underlying quad grid; h = (x1-x0)/nx
  std::vector<std::array<double, 2>> verts;
  std::vector<std::array<int, 3>> tris; // counterclockwise vertex ids

  Periodic periodic;
  // Per local face: neighbor element (or -1), neighbor local face, boundary
  // side tag (-1 for interior), and the coordinate translation that carries
  // this face onto the neighbor's (nonzero only for periodic pairs).
  std::vector<std::array<int, 3>> etoe;
  std::vector<std::array<int, 3>> etof;
  std::vector<std::array<int, 3>> bside;
  std::vector<std::array<std::array<double, 2>, 3>> face_shift;
};

// Uniform mesh of nx x ny quads on [x0,x1] x [y0,y1], each bisected along
// the lower-left to upper-right diagonal. Fills connectivity.
Mesh uniform_tri_mesh(int nx, int ny, double x0, double x1, double y0,
                      double y1, Periodic periodic = {});

// Rebuilds face connectivity (vertex-pair matching; periodic pairs matched
// through the structured grid).
void connect(Mesh& mesh);

// Per-element modal coordinate polynomials. Affine meshes carry exact
// degree-1 coefficients; warped meshes interpolate the warp at the shared
// equispaced nodes so neighbor face traces stay identical.
struct CoordinateMap {
  int Np = 0;
  std::vector<double> x, y; // K x Np modal coefficients
  std::vector<std::uint8_t> affine;
};

CoordinateMap affine_coordinates(const Mesh& mesh, const ReferenceElement& re);

// Waveguide warp applied on [0,2] x [0,1]:
//   x_w = x + (1/10) cos(pi x / 2) cos(3 pi y)
//   y_w = y + (1/20) sin(pi x) cos(3 pi y)
std::array<double, 2> lamb_warp(double x, double y);

// Interpolates the warp at the shared equispaced nodes, leaving nodes on the
// domain boundary fixed: boundary faces stay straight and the rectangle (and
// its periodic pairings) is preserved.
CoordinateMap warp_lamb_mesh(const Mesh& mesh, const ReferenceElement& re);

struct Geometry {
  int K = 0, Nq = 0, Nfq = 0;
  bool curvilinear = false;
  std::vector<std::uint8_t> affine; // per element
  // Volume quadrature data, K x Nq.
  std::vector<double> xq, yq;
  std::vector<double> rx, ry, sx, sy, J;
  // Face quadrature data, K x (3 Nfq); Jf is d(arclength)/d(xi).
  std::vector<double> xf, yf, nx, ny, Jf;
  double minJ = 0;
};

// Evaluates coordinates, metric terms, outward normals and Jacobians at all
// quadrature points. Throws invalid_input if any volume Jacobian is not
// strictly positive.
Geometry geometric_factors(const Mesh& mesh, const ReferenceElement& re,
                           const CoordinateMap& coords);

// Plain-text mesh dump (vertices, triangles, connectivity, boundary tags).
void dump_mesh(const Mesh& mesh, std::ostream& os);

} // namespace wadg
