#include "plarod/fem.hpp"

#include <cmath>
#include <stdexcept>

#include "plarod/parallel.hpp"
#include "plarod/quadrature.hpp"

namespace plarod {

Eigen::VectorXd DofMap::reduce(const Eigen::VectorXd& full) const {
  Eigen::VectorXd r(n_free());
  for (int i = 0; i < n_free(); ++i) r(i) = full(free_list[i]);
  return r;
}

Eigen::VectorXd DofMap::expand(const Eigen::VectorXd& free) const {
  Eigen::VectorXd full = Eigen::VectorXd::Zero(total);
  for (int i = 0; i < n_free(); ++i) full(free_list[i]) = free(i);
  return full;
}

DofMap build_dof_map(const PlateMesh& plate, const RodMesh& rod) {
  if (plate.origin_node < 0)
    throw std::invalid_argument("dof map: plate mesh has no node at the junction");
  DofMap dm;
  dm.n_plate_nodes = plate.n_nodes();
  dm.n_rod_nodes = rod.n_nodes();
  dm.total = 6 * dm.n_plate_nodes + 5 * dm.n_rod_nodes;
  dm.constrained.assign(dm.total, 0);

  // Clamped plate edges: u = 0, w = 0, grad w = 0; the mixed DOF w_xy is the
  // tangential derivative of the normal slope along the edge, so it vanishes
  // there as well.
  for (int j = 0; j <= plate.ny; ++j)
    for (int i = 0; i <= plate.nx; ++i)
      if (plate.node_clamped(i, j)) {
        const int n = plate.node_id(i, j);
        for (int d = 0; d < 6; ++d) dm.constrained[dm.plate_dof(n, d)] = 1;
      }

  // Junction end of the rod: W1 = W1' = W2 = W2' = Q3 = 0.
  for (int d = 0; d < 5; ++d) dm.constrained[dm.rod_dof(0, d)] = 1;

  dm.u3_origin = dm.plate_dof(plate.origin_node, 2);
  dm.free_index.assign(dm.total, -1);
  for (int d = 0; d < dm.total; ++d)
    if (!dm.constrained[d]) {
      dm.free_index[d] = static_cast<int>(dm.free_list.size());
      dm.free_list.push_back(d);
    }
  return dm;
}

// ---------------------------------------------------------------------------
// shape functions
// ---------------------------------------------------------------------------

namespace {

// Cubic Hermite pack on [0,1] for one coordinate direction with element size
// h: basis order [value@0, slope@0, value@1, slope@1], physical derivatives.
struct Hermite1D {
  std::array<double, 4> v, d1, d2, d3;
};

Hermite1D hermite1d(double h, double t) {
  Hermite1D r;
  const double t2 = t * t, t3 = t2 * t;
  r.v = {1 - 3 * t2 + 2 * t3, h * (t - 2 * t2 + t3), 3 * t2 - 2 * t3,
         h * (-t2 + t3)};
  const std::array<double, 4> dt = {-6 * t + 6 * t2, h * (1 - 4 * t + 3 * t2),
                                    6 * t - 6 * t2, h * (-2 * t + 3 * t2)};
  const std::array<double, 4> dtt = {-6 + 12 * t, h * (-4 + 6 * t), 6 - 12 * t,
                                     h * (-2 + 6 * t)};
  const std::array<double, 4> dttt = {12, 6 * h, -12, 6 * h};
  for (int i = 0; i < 4; ++i) {
    r.d1[i] = dt[i] / h;
    r.d2[i] = dtt[i] / (h * h);
    r.d3[i] = dttt[i] / (h * h * h);
  }
  return r;
}

}  // namespace

PlateShape plate_shape(double hx, double hy, double xi, double eta,
                       bool with_thirds) {
  PlateShape s;
  const Hermite1D X = hermite1d(hx, xi);
  const Hermite1D Y = hermite1d(hy, eta);

  // bilinear for the in-plane fields
  const std::array<double, 2> lx = {1 - xi, xi}, ly = {1 - eta, eta};
  const std::array<double, 2> lxd = {-1 / hx, 1 / hx}, lyd = {-1 / hy, 1 / hy};
  for (int l = 0; l < 4; ++l) {
    const int a = l & 1, b = l >> 1;
    s.N[l] = lx[a] * ly[b];
    s.Nx[l] = lxd[a] * ly[b];
    s.Ny[l] = lx[a] * lyd[b];
  }

  // BFS: per node (a,b), dofs (w, w_x, w_y, w_xy)
  for (int l = 0; l < 4; ++l) {
    const int a = l & 1, b = l >> 1;
    const std::array<int, 4> ix = {2 * a, 2 * a + 1, 2 * a, 2 * a + 1};
    const std::array<int, 4> iy = {2 * b, 2 * b, 2 * b + 1, 2 * b + 1};
    for (int d = 0; d < 4; ++d) {
      const int k = 4 * l + d;
      s.B[k] = X.v[ix[d]] * Y.v[iy[d]];
      s.Bx[k] = X.d1[ix[d]] * Y.v[iy[d]];
      s.By[k] = X.v[ix[d]] * Y.d1[iy[d]];
      s.Bxx[k] = X.d2[ix[d]] * Y.v[iy[d]];
      s.Bxy[k] = X.d1[ix[d]] * Y.d1[iy[d]];
      s.Byy[k] = X.v[ix[d]] * Y.d2[iy[d]];
      if (with_thirds) {
        s.Bxxx[k] = X.d3[ix[d]] * Y.v[iy[d]];
        s.Bxxy[k] = X.d2[ix[d]] * Y.d1[iy[d]];
        s.Bxyy[k] = X.d1[ix[d]] * Y.d2[iy[d]];
        s.Byyy[k] = X.v[ix[d]] * Y.d3[iy[d]];
      }
    }
  }
  return s;
}

RodShape rod_shape(double h, double t) {
  RodShape s;
  const Hermite1D H = hermite1d(h, t);
  s.Hv = H.v;
  s.Hd = H.d1;
  s.Hdd = H.d2;
  s.Hddd = H.d3;
  s.Lv = {1 - t, t};
  s.Ld = {-1 / h, 1 / h};
  return s;
}

// ---------------------------------------------------------------------------
// interpolation
// ---------------------------------------------------------------------------

namespace {

void locate_plate(const PlateMesh& mesh, double x1, double x2, int& ex, int& ey,
                  double& xi, double& eta) {
  if (!mesh.inside(x1, x2))
    throw std::invalid_argument("interpolation point outside the plate");
  ex = std::min(mesh.nx - 1, std::max(0, static_cast<int>((x1 + mesh.a1) / mesh.hx)));
  ey = std::min(mesh.ny - 1, std::max(0, static_cast<int>((x2 + mesh.a2) / mesh.hy)));
  xi = (x1 - mesh.node_x(ex)) / mesh.hx;
  eta = (x2 - mesh.node_y(ey)) / mesh.hy;
}

}  // namespace

PlatePointEval eval_plate_state(const PlateMesh& mesh, const DofMap& dm,
                                const Eigen::VectorXd& x, double x1, double x2,
                                bool with_thirds) {
  int ex, ey;
  double xi, eta;
  locate_plate(mesh, x1, x2, ex, ey, xi, eta);
  const PlateShape s = plate_shape(mesh.hx, mesh.hy, xi, eta, with_thirds);
  const auto nodes = mesh.elem_nodes(ey * mesh.nx + ex);

  PlatePointEval r;
  for (int l = 0; l < 4; ++l) {
    const double u1 = x(dm.plate_dof(nodes[l], 0));
    const double u2 = x(dm.plate_dof(nodes[l], 1));
    r.u1 += s.N[l] * u1;
    r.u2 += s.N[l] * u2;
    r.du1(0) += s.Nx[l] * u1;
    r.du1(1) += s.Ny[l] * u1;
    r.du2(0) += s.Nx[l] * u2;
    r.du2(1) += s.Ny[l] * u2;
    // bilinear: only the mixed second derivative survives
    const double cxy_1 = (l == 0 || l == 3 ? 1.0 : -1.0) / (mesh.hx * mesh.hy);
    r.d2u1[1] += cxy_1 * u1;
    r.d2u2[1] += cxy_1 * u2;
    for (int d = 0; d < 4; ++d) {
      const double wd = x(dm.plate_dof(nodes[l], 2 + d));
      const int k = 4 * l + d;
      r.w += s.B[k] * wd;
      r.dw(0) += s.Bx[k] * wd;
      r.dw(1) += s.By[k] * wd;
      r.d2w[0] += s.Bxx[k] * wd;
      r.d2w[1] += s.Bxy[k] * wd;
      r.d2w[2] += s.Byy[k] * wd;
      if (with_thirds) {
        r.d3w[0] += s.Bxxx[k] * wd;
        r.d3w[1] += s.Bxxy[k] * wd;
        r.d3w[2] += s.Bxyy[k] * wd;
        r.d3w[3] += s.Byyy[k] * wd;
      }
    }
  }
  return r;
}

RodPointEval eval_rod_state(const RodMesh& mesh, const DofMap& dm,
                            const Eigen::VectorXd& x, double x3) {
  if (x3 < -1e-12 || x3 > mesh.length * (1.0 + 1e-12))
    throw std::invalid_argument("interpolation point outside the rod");
  const int e = std::min(mesh.n_elems - 1,
                         std::max(0, static_cast<int>(x3 / mesh.h)));
  const double t = (x3 - mesh.node_x(e)) / mesh.h;
  const RodShape s = rod_shape(mesh.h, t);
  RodPointEval r;
  const int n0 = e, n1 = e + 1;
  const std::array<int, 4> w1 = {dm.rod_dof(n0, 0), dm.rod_dof(n0, 1),
                                 dm.rod_dof(n1, 0), dm.rod_dof(n1, 1)};
  const std::array<int, 4> w2 = {dm.rod_dof(n0, 2), dm.rod_dof(n0, 3),
                                 dm.rod_dof(n1, 2), dm.rod_dof(n1, 3)};
  for (int k = 0; k < 4; ++k) {
    r.W1 += s.Hv[k] * x(w1[k]);
    r.dW1 += s.Hd[k] * x(w1[k]);
    r.d2W1 += s.Hdd[k] * x(w1[k]);
    r.d3W1 += s.Hddd[k] * x(w1[k]);
    r.W2 += s.Hv[k] * x(w2[k]);
    r.dW2 += s.Hd[k] * x(w2[k]);
    r.d2W2 += s.Hdd[k] * x(w2[k]);
    r.d3W2 += s.Hddd[k] * x(w2[k]);
  }
  r.Q3 = s.Lv[0] * x(dm.rod_dof(n0, 4)) + s.Lv[1] * x(dm.rod_dof(n1, 4));
  r.dQ3 = s.Ld[0] * x(dm.rod_dof(n0, 4)) + s.Ld[1] * x(dm.rod_dof(n1, 4));
  return r;
}

// ---------------------------------------------------------------------------
// assembly
// ---------------------------------------------------------------------------

double SparseSymmetric::symmetry_error() const {
  Eigen::SparseMatrix<double, Eigen::RowMajor> d = m;
  d -= Eigen::SparseMatrix<double, Eigen::RowMajor>(m.transpose());
  double err = 0.0;
  for (int k = 0; k < d.outerSize(); ++k)
    for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(d, k);
         it; ++it)
      err = std::max(err, std::abs(it.value()));
  return err;
}

namespace {

constexpr int kPlateElemDofs = 24;  // 16 deflection + 4 u1 + 4 u2
constexpr int kRodElemDofs = 10;    // 4 W1 + 4 W2 + 2 Q3

struct ElemWork {
  double energy = 0.0;
  Eigen::Matrix<double, Eigen::Dynamic, 1> grad;
  Eigen::MatrixXd hess;
};

struct QuadCache {
  std::vector<double> gw;          // tensor weights per gp
  std::vector<double> gx, gy;      // local coords per gp
  std::vector<PlateShape> shapes;  // per gp (congruent elements)
};

QuadCache plate_cache(const PlateMesh& mesh) {
  QuadCache c;
  const GaussRule g = gauss_legendre(mesh.gauss_order);
  for (int a = 0; a < mesh.gauss_order; ++a)
    for (int b = 0; b < mesh.gauss_order; ++b) {
      const double xi = 0.5 * (g.nodes[a] + 1.0), eta = 0.5 * (g.nodes[b] + 1.0);
      c.gx.push_back(xi);
      c.gy.push_back(eta);
      c.gw.push_back(0.25 * g.weights[a] * g.weights[b] * mesh.hx * mesh.hy);
      c.shapes.push_back(plate_shape(mesh.hx, mesh.hy, xi, eta, false));
    }
  return c;
}

// gathers local dof ids: [w(16), u1(4), u2(4)]
std::array<int, kPlateElemDofs> plate_elem_dofs(const PlateMesh& mesh,
                                                const DofMap& dm, int e) {
  std::array<int, kPlateElemDofs> ids{};
  const auto nodes = mesh.elem_nodes(e);
  for (int l = 0; l < 4; ++l)
    for (int d = 0; d < 4; ++d) ids[4 * l + d] = dm.plate_dof(nodes[l], 2 + d);
  for (int l = 0; l < 4; ++l) {
    ids[16 + l] = dm.plate_dof(nodes[l], 0);
    ids[20 + l] = dm.plate_dof(nodes[l], 1);
  }
  return ids;
}

std::array<int, kRodElemDofs> rod_elem_dofs(const DofMap& dm, int e) {
  return {dm.rod_dof(e, 0),     dm.rod_dof(e, 1),     dm.rod_dof(e + 1, 0),
          dm.rod_dof(e + 1, 1), dm.rod_dof(e, 2),     dm.rod_dof(e, 3),
          dm.rod_dof(e + 1, 2), dm.rod_dof(e + 1, 3), dm.rod_dof(e, 4),
          dm.rod_dof(e + 1, 4)};
}

void plate_element(const PlateMesh& mesh, const DofMap& dm,
                   const Eigen::VectorXd& x, const ForceData* fd,
                   const MaterialParams& m, const AssemblyOptions& opts,
                   const QuadCache& cache, int e, ElemWork& out) {
  const auto ids = plate_elem_dofs(mesh, dm, e);
  std::array<double, kPlateElemDofs> xe{};
  for (int k = 0; k < kPlateElemDofs; ++k) xe[k] = x(ids[k]);

  const double nu = m.poisson;
  const double cB = plate_bending_coef(m);
  const double cM = plate_membrane_coef(m);
  int ex, ey;
  mesh.elem_cell(e, ex, ey);
  const double x0 = mesh.node_x(ex), y0 = mesh.node_y(ey);

  if (opts.gradient) out.grad.setZero(kPlateElemDofs);
  if (opts.hessian) out.hess.setZero(kPlateElemDofs, kPlateElemDofs);
  out.energy = 0.0;

  for (std::size_t gp = 0; gp < cache.gw.size(); ++gp) {
    const PlateShape& s = cache.shapes[gp];
    const double wq = cache.gw[gp];

    double w = 0, G1 = 0, G2 = 0, H11 = 0, H12 = 0, H22 = 0;
    for (int k = 0; k < 16; ++k) {
      w += s.B[k] * xe[k];
      G1 += s.Bx[k] * xe[k];
      G2 += s.By[k] * xe[k];
      H11 += s.Bxx[k] * xe[k];
      H12 += s.Bxy[k] * xe[k];
      H22 += s.Byy[k] * xe[k];
    }
    double u1 = 0, u2 = 0, u1x = 0, u1y = 0, u2x = 0, u2y = 0;
    for (int l = 0; l < 4; ++l) {
      u1 += s.N[l] * xe[16 + l];
      u1x += s.Nx[l] * xe[16 + l];
      u1y += s.Ny[l] * xe[16 + l];
      u2 += s.N[l] * xe[20 + l];
      u2x += s.Nx[l] * xe[20 + l];
      u2y += s.Ny[l] * xe[20 + l];
    }
    const double Z11 = u1x + 0.5 * G1 * G1;
    const double Z22 = u2y + 0.5 * G2 * G2;
    const double Z12 = 0.5 * (u1y + u2x) + 0.5 * G1 * G2;

    if (opts.elastic) {
      const double trH = H11 + H22, trZ = Z11 + Z22;
      out.energy +=
          wq * (cB * ((1 - nu) * (H11 * H11 + 2 * H12 * H12 + H22 * H22) +
                      nu * trH * trH) +
                cM * ((1 - nu) * (Z11 * Z11 + 2 * Z12 * Z12 + Z22 * Z22) +
                      nu * trZ * trZ));
    }

    Vec3 fp = Vec3::Zero();
    if (opts.load && fd) {
      fp = fd->f_p_at(x0 + cache.gx[gp] * mesh.hx, y0 + cache.gy[gp] * mesh.hy);
      out.energy -= wq * 2.0 * (fp(0) * u1 + fp(1) * u2 + fp(2) * w);
    }

    if (!opts.gradient && !opts.hessian) continue;

    // bending stress and membrane stress (derivatives of the densities)
    const double trH = H11 + H22, trZ = Z11 + Z22;
    const double S11 = cB * (2 * (1 - nu) * H11 + 2 * nu * trH);
    const double S12 = cB * 4 * (1 - nu) * H12;
    const double S22 = cB * (2 * (1 - nu) * H22 + 2 * nu * trH);
    const double N11 = cM * (2 * (1 - nu) * Z11 + 2 * nu * trZ);
    const double N12 = cM * 4 * (1 - nu) * Z12;
    const double N22 = cM * (2 * (1 - nu) * Z22 + 2 * nu * trZ);

    if (opts.gradient) {
      for (int k = 0; k < 16; ++k) {
        double g = 0.0;
        if (opts.elastic) {
          g += S11 * s.Bxx[k] + S12 * s.Bxy[k] + S22 * s.Byy[k];
          g += N11 * G1 * s.Bx[k] + N22 * G2 * s.By[k] +
               N12 * 0.5 * (G1 * s.By[k] + G2 * s.Bx[k]);
        }
        if (opts.load && fd) g -= 2.0 * fp(2) * s.B[k];
        out.grad(k) += wq * g;
      }
      for (int l = 0; l < 4; ++l) {
        double g1 = 0.0, g2 = 0.0;
        if (opts.elastic) {
          g1 += N11 * s.Nx[l] + N12 * 0.5 * s.Ny[l];
          g2 += N22 * s.Ny[l] + N12 * 0.5 * s.Nx[l];
        }
        if (opts.load && fd) {
          g1 -= 2.0 * fp(0) * s.N[l];
          g2 -= 2.0 * fp(1) * s.N[l];
        }
        out.grad(16 + l) += wq * g1;
        out.grad(20 + l) += wq * g2;
      }
    }

    if (opts.hessian && opts.elastic) {
      // strain-displacement rows (Z11, Z12, Z22) for all 24 local dofs
      std::array<double, kPlateElemDofs> B1{}, B2{}, B3{};
      for (int k = 0; k < 16; ++k) {
        B1[k] = G1 * s.Bx[k];
        B2[k] = 0.5 * (G1 * s.By[k] + G2 * s.Bx[k]);
        B3[k] = G2 * s.By[k];
      }
      for (int l = 0; l < 4; ++l) {
        B1[16 + l] = s.Nx[l];
        B2[16 + l] = 0.5 * s.Ny[l];
        B2[20 + l] = 0.5 * s.Nx[l];
        B3[20 + l] = s.Ny[l];
      }
      const double D11 = 2 * cM, D13 = 2 * cM * nu, D22 = 4 * cM * (1 - nu);
      for (int k = 0; k < kPlateElemDofs; ++k)
        for (int l = k; l < kPlateElemDofs; ++l) {
          double h = D11 * (B1[k] * B1[l] + B3[k] * B3[l]) +
                     D13 * (B1[k] * B3[l] + B3[k] * B1[l]) +
                     D22 * B2[k] * B2[l];
          if (k < 16 && l < 16) {
            // bending block + membrane geometric stiffness
            h += cB * (2 * (1 - nu) *
                           (s.Bxx[k] * s.Bxx[l] + 2 * s.Bxy[k] * s.Bxy[l] +
                            s.Byy[k] * s.Byy[l]) +
                       2 * nu * (s.Bxx[k] + s.Byy[k]) * (s.Bxx[l] + s.Byy[l]));
            h += N11 * s.Bx[k] * s.Bx[l] + N22 * s.By[k] * s.By[l] +
                 N12 * 0.5 * (s.Bx[k] * s.By[l] + s.By[k] * s.Bx[l]);
          }
          out.hess(k, l) += wq * h;
          if (l != k) out.hess(l, k) += wq * h;
        }
    }
  }
}

void rod_element(const RodMesh& mesh, const DofMap& dm, const Eigen::VectorXd& x,
                 const ForceData* fd, const MaterialParams& m,
                 const AssemblyOptions& opts, const GaussRule& base,
                 const std::vector<double>& Fr3_at_gp, int e, ElemWork& out) {
  const auto ids = rod_elem_dofs(dm, e);
  std::array<double, kRodElemDofs> xe{};
  for (int k = 0; k < kRodElemDofs; ++k) xe[k] = x(ids[k]);

  const double cRB = rod_bending_coef(m);
  const double cT = rod_torsion_coef(m);
  const double cG = moment_load_coef();

  if (opts.gradient) out.grad.setZero(kRodElemDofs);
  if (opts.hessian) out.hess.setZero(kRodElemDofs, kRodElemDofs);
  out.energy = 0.0;

  const int ng = static_cast<int>(base.nodes.size());
  for (int gp = 0; gp < ng; ++gp) {
    const double t = 0.5 * (base.nodes[gp] + 1.0);
    const double wq = 0.5 * base.weights[gp] * mesh.h;
    const double x3 = mesh.node_x(e) + t * mesh.h;
    const RodShape s = rod_shape(mesh.h, t);

    double W1 = 0, dW1 = 0, ddW1 = 0, W2 = 0, dW2 = 0, ddW2 = 0;
    for (int k = 0; k < 4; ++k) {
      W1 += s.Hv[k] * xe[k];
      dW1 += s.Hd[k] * xe[k];
      ddW1 += s.Hdd[k] * xe[k];
      W2 += s.Hv[k] * xe[4 + k];
      dW2 += s.Hd[k] * xe[4 + k];
      ddW2 += s.Hdd[k] * xe[4 + k];
    }
    const double Q3 = s.Lv[0] * xe[8] + s.Lv[1] * xe[9];
    const double dQ3 = s.Ld[0] * xe[8] + s.Ld[1] * xe[9];

    if (opts.elastic)
      out.energy += wq * (cRB * (ddW1 * ddW1 + ddW2 * ddW2) + cT * dQ3 * dQ3);

    double F = 0.0;
    Vec3 fr = Vec3::Zero(), G1v = Vec3::Zero(), G2v = Vec3::Zero();
    if (opts.load && fd) {
      F = Fr3_at_gp[static_cast<std::size_t>(e) * ng + gp];
      fr = fd->f_r_at(x3);
      G1v = fd->g1_at(x3);
      G2v = fd->g2_at(x3);
      // -L contributes +(pi/2) F (|W1'|^2+|W2'|^2) and the linear pairings
      out.energy += wq * (0.5 * M_PI * F * (dW1 * dW1 + dW2 * dW2) -
                          M_PI * (fr(0) * W1 + fr(1) * W2) -
                          cG * (G1v(1) * Q3 - G1v(2) * dW1 - G2v(0) * Q3 -
                                G2v(2) * dW2));
    }

    if (opts.gradient) {
      for (int k = 0; k < 4; ++k) {
        double g1 = 0.0, g2 = 0.0;
        if (opts.elastic) {
          g1 += 2 * cRB * ddW1 * s.Hdd[k];
          g2 += 2 * cRB * ddW2 * s.Hdd[k];
        }
        if (opts.load && fd) {
          g1 += M_PI * F * dW1 * s.Hd[k] - M_PI * fr(0) * s.Hv[k] +
                cG * G1v(2) * s.Hd[k];
          g2 += M_PI * F * dW2 * s.Hd[k] - M_PI * fr(1) * s.Hv[k] +
                cG * G2v(2) * s.Hd[k];
        }
        out.grad(k) += wq * g1;
        out.grad(4 + k) += wq * g2;
      }
      for (int k = 0; k < 2; ++k) {
        double g = 0.0;
        if (opts.elastic) g += 2 * cT * dQ3 * s.Ld[k];
        if (opts.load && fd) g -= cG * (G1v(1) - G2v(0)) * s.Lv[k];
        out.grad(8 + k) += wq * g;
      }
    }

    if (opts.hessian) {
      // fill the upper triangle and mirror so the matrix is symmetric to
      // the last bit
      for (int k = 0; k < 4; ++k)
        for (int l = k; l < 4; ++l) {
          double h = 0.0;
          if (opts.elastic) h += 2 * cRB * s.Hdd[k] * s.Hdd[l];
          if (opts.load && fd) h += M_PI * F * s.Hd[k] * s.Hd[l];
          out.hess(k, l) += wq * h;
          out.hess(4 + k, 4 + l) += wq * h;
          if (l != k) {
            out.hess(l, k) += wq * h;
            out.hess(4 + l, 4 + k) += wq * h;
          }
        }
      if (opts.elastic)
        for (int k = 0; k < 2; ++k)
          for (int l = k; l < 2; ++l) {
            const double h = wq * 2 * cT * s.Ld[k] * s.Ld[l];
            out.hess(8 + k, 8 + l) += h;
            if (l != k) out.hess(8 + l, 8 + k) += h;
          }
    }
  }
}

}  // namespace

AssemblyResult assemble(const PlateMesh& plate, const RodMesh& rod,
                        const DofMap& dm, const Eigen::VectorXd& x,
                        const ForceData* fd, const MaterialParams& m,
                        const AssemblyOptions& opts) {
  if (x.size() != dm.total)
    throw std::invalid_argument("assemble: state size does not match dof map");
  if (opts.load && fd == nullptr)
    throw std::invalid_argument("assemble: load requested without force data");

  AssemblyResult res;
  const int nfree = dm.n_free();
  if (opts.gradient) res.grad = Eigen::VectorXd::Zero(nfree);

  const int np = opts.plate_part ? plate.n_elems() : 0;
  const int nr = opts.rod_part ? rod.n_elems : 0;
  std::vector<ElemWork> pwork(np), rwork(nr);

  const QuadCache cache = opts.plate_part ? plate_cache(plate) : QuadCache{};
  const GaussRule rbase = gauss_legendre(rod.gauss_order);

  // Suffix antiderivative of f_{r,3} at the rod quadrature points.
  std::vector<double> Fr3;
  if (opts.load && fd && opts.rod_part) {
    Fr3.resize(static_cast<std::size_t>(rod.n_elems) * rbase.nodes.size());
    for (int e = 0; e < rod.n_elems; ++e)
      for (std::size_t gp = 0; gp < rbase.nodes.size(); ++gp) {
        const double t = 0.5 * (rbase.nodes[gp] + 1.0);
        Fr3[static_cast<std::size_t>(e) * rbase.nodes.size() + gp] =
            antiderivative_Fr3(*fd, rod.node_x(e) + t * rod.h);
      }
  }

  parallel_for(static_cast<std::size_t>(np), opts.threads, [&](std::size_t e) {
    plate_element(plate, dm, x, fd, m, opts, cache, static_cast<int>(e),
                  pwork[e]);
  });
  parallel_for(static_cast<std::size_t>(nr), opts.threads, [&](std::size_t e) {
    rod_element(rod, dm, x, fd, m, opts, rbase, Fr3, static_cast<int>(e),
                rwork[e]);
  });

  // Deterministic sequential scatter.
  std::vector<Eigen::Triplet<double>> trips;
  auto scatter = [&]<std::size_t N>(const ElemWork& w,
                                    const std::array<int, N>& ids) {
    res.energy += w.energy;
    if (opts.gradient)
      for (std::size_t k = 0; k < N; ++k) {
        const int fk = dm.free_index[ids[k]];
        if (fk >= 0) res.grad(fk) += w.grad(static_cast<int>(k));
      }
    if (opts.hessian)
      for (std::size_t k = 0; k < N; ++k) {
        const int fk = dm.free_index[ids[k]];
        if (fk < 0) continue;
        for (std::size_t l = 0; l < N; ++l) {
          const int fl = dm.free_index[ids[l]];
          const double v = w.hess(static_cast<int>(k), static_cast<int>(l));
          if (fl >= 0 && v != 0.0) trips.emplace_back(fk, fl, v);
        }
      }
  };
  for (int e = 0; e < np; ++e) scatter(pwork[e], plate_elem_dofs(plate, dm, e));
  for (int e = 0; e < nr; ++e) scatter(rwork[e], rod_elem_dofs(dm, e));

  // Junction point load: -pi F_{r,3}(0) U3(0,0)
  if (opts.load && fd && opts.rod_part) {
    const double F0 = antiderivative_Fr3(*fd, 0.0);
    if (F0 != 0.0) {
      res.energy -= M_PI * F0 * x(dm.u3_origin);
      if (opts.gradient) {
        const int fo = dm.free_index[dm.u3_origin];
        if (fo >= 0) res.grad(fo) -= M_PI * F0;
      }
    }
  }

  if (opts.hessian) {
    Eigen::SparseMatrix<double, Eigen::RowMajor> H(nfree, nfree);
    H.setFromTriplets(trips.begin(), trips.end());
    H.prune(0.0, 0.0);
    res.hess.m = std::move(H);
  }
  return res;
}

}  // namespace plarod
