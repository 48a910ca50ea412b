#pragma once

#include <array>
#include <vector>

#include "plarod/quadrature.hpp"

namespace plarod {

// Edge indices of the rectangular mid-surface.
enum PlateEdge { kEdgeXMin = 0, kEdgeXMax = 1, kEdgeYMin = 2, kEdgeYMax = 3 };

/// Mid-surface omega = [-a1,a1] x [-a2,a2] with the junction at the origin.
/// The unit disc around the junction must be compactly contained in omega.
struct PlateDomain {
  double a1 = 2.0;
  double a2 = 2.0;
  std::array<bool, 4> clamped = {true, true, true, true};  // gamma_0 edges

  void validate() const;
};

struct RodDomain {
  double length = 1.0;
  double delta = 0.1;  // physical half-thickness, used by the 3D arm only

  void validate() const;
};

/// Structured rectangular mesh of omega with a node at the origin.
struct PlateMesh {
  double a1 = 0, a2 = 0;
  int nx = 0, ny = 0;  // element counts per axis (even)
  double hx = 0, hy = 0;
  std::array<bool, 4> clamped = {false, false, false, false};
  int gauss_order = 4;
  int origin_node = -1;

  int n_nodes() const { return (nx + 1) * (ny + 1); }
  int n_elems() const { return nx * ny; }
  int node_id(int i, int j) const { return j * (nx + 1) + i; }
  double node_x(int i) const { return -a1 + i * hx; }
  double node_y(int j) const { return -a2 + j * hy; }
  // element e = ey*nx + ex covers [x0, x0+hx] x [y0, y0+hy]
  void elem_cell(int e, int& ex, int& ey) const { ex = e % nx; ey = e / nx; }
  std::array<int, 4> elem_nodes(int e) const {
    int ex, ey;
    elem_cell(e, ex, ey);
    return {node_id(ex, ey), node_id(ex + 1, ey), node_id(ex, ey + 1),
            node_id(ex + 1, ey + 1)};
  }
  bool node_clamped(int i, int j) const {
    return (clamped[kEdgeXMin] && i == 0) || (clamped[kEdgeXMax] && i == nx) ||
           (clamped[kEdgeYMin] && j == 0) || (clamped[kEdgeYMax] && j == ny);
  }
  bool inside(double x1, double x2, double tol = 1e-12) const {
    return x1 >= -a1 - tol && x1 <= a1 + tol && x2 >= -a2 - tol && x2 <= a2 + tol;
  }
};

struct RodMesh {
  double length = 0;
  int n_elems = 0;
  double h = 0;
  int gauss_order = 3;

  int n_nodes() const { return n_elems + 1; }
  double node_x(int k) const { return k * h; }
};

PlateMesh build_plate_mesh(const PlateDomain& dom, int nx, int ny, int gauss_order = 4);
RodMesh build_rod_mesh(const RodDomain& dom, int n_elems, int gauss_order = 3);

/// Tensor quadrature over the rescaled plate Omega = omega x ]-1,1[ and the
/// rescaled rod B = D(O,1) x ]0,L[.  Rod points with axial coordinate in
/// ]0,delta[ are flagged excluded (the junction cylinder belongs to the
/// plate integral); the axial rule is split at delta so the retained weights
/// integrate the truncated rod exactly.
struct ThinQuadrature {
  struct PlatePoint {
    double x1, x2, X3, w;
    int elem;
  };
  struct RodPoint {
    double X1, X2, x3, w;
    bool excluded;
  };
  struct DiscPoint {
    double X1, X2, w;
  };

  std::vector<PlatePoint> plate;
  std::vector<RodPoint> rod;
  std::vector<DiscPoint> disc;        // rule over D(O,1), weights sum to pi
  std::vector<double> rod_axial;      // distinct axial nodes (sorted)
  double delta = 0.0;
  double plate_measure = 0.0;         // sum of plate weights
  double rod_measure = 0.0;           // sum of all rod weights (pi*L)
};

ThinQuadrature thin_quadrature(const PlateMesh& plate, const RodMesh& rod,
                               double delta, int order);

/// Polar tensor rule over the unit disc: nr radial Gauss points, nt uniform
/// angles; exact for polynomials of total degree <= min(2*nr-2, nt-1).
std::vector<ThinQuadrature::DiscPoint> disc_rule(int nr, int nt);

}  // namespace plarod
