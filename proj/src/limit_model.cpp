#include "plarod/limit_model.hpp"

#include <cmath>
#include <stdexcept>

#include "plarod/quadrature.hpp"

namespace plarod {

Discretization make_discretization(const PlateDomain& pd, const RodDomain& rd,
                                   int nx, int ny, int rod_elems,
                                   int plate_gauss, int rod_gauss) {
  Discretization d;
  d.plate = build_plate_mesh(pd, nx, ny, plate_gauss);
  d.rod = build_rod_mesh(rd, rod_elems, rod_gauss);
  d.dm = build_dof_map(d.plate, d.rod);
  return d;
}

MembraneStrain membrane_strain(const LimitState& s, double x1, double x2) {
  const PlatePointEval e =
      eval_plate_state(s.disc->plate, s.disc->dm, s.dofs, x1, x2);
  MembraneStrain z;
  z.Z11 = e.du1(0) + 0.5 * e.dw(0) * e.dw(0);
  z.Z22 = e.du2(1) + 0.5 * e.dw(1) * e.dw(1);
  z.Z12 = 0.5 * (e.du1(1) + e.du2(0)) + 0.5 * e.dw(0) * e.dw(1);
  return z;
}

double recover_W3(const LimitState& s, double x3) {
  const RodMesh& rod = s.disc->rod;
  if (x3 < -1e-12 || x3 > rod.length * (1 + 1e-12))
    throw std::invalid_argument("recover_W3: x3 outside [0, L]");
  const GaussRule base = gauss_legendre(3);  // exact for the quartic |W'|^2
  double acc = 0.0;
  auto qdot = [&](double t) {
    const RodPointEval e = eval_rod_state(rod, s.disc->dm, s.dofs, t);
    return e.dW1 * e.dW1 + e.dW2 * e.dW2;
  };
  for (int e = 0; e < rod.n_elems; ++e) {
    const double xa = rod.node_x(e);
    const double xb = std::min(rod.node_x(e + 1), x3);
    if (xb <= xa) break;
    const GaussRule g = mapped_rule(base, xa, xb);
    for (std::size_t k = 0; k < g.nodes.size(); ++k)
      acc += g.weights[k] * qdot(g.nodes[k]);
    if (xb >= x3) break;
  }
  return s.u3_at_origin() - 0.5 * acc;
}

namespace {

AssemblyOptions energy_opts(bool elastic, bool load, bool plate, bool rodp) {
  AssemblyOptions o;
  o.gradient = false;
  o.hessian = false;
  o.elastic = elastic;
  o.load = load;
  o.plate_part = plate;
  o.rod_part = rodp;
  return o;
}

}  // namespace

double plate_energy(const LimitState& s, const MaterialParams& m) {
  return assemble(s.disc->plate, s.disc->rod, s.disc->dm, s.dofs, nullptr, m,
                  energy_opts(true, false, true, false))
      .energy;
}

double rod_energy(const LimitState& s, const MaterialParams& m) {
  return assemble(s.disc->plate, s.disc->rod, s.disc->dm, s.dofs, nullptr, m,
                  energy_opts(true, false, false, true))
      .energy;
}

double load_functional(const LimitState& s, const ForceData& fd) {
  MaterialParams dummy;
  dummy.young = dummy.mu = 1.0;
  dummy.lambda = dummy.poisson = 0.0;
  const double e = assemble(s.disc->plate, s.disc->rod, s.disc->dm, s.dofs, &fd,
                            dummy, energy_opts(false, true, true, true))
                       .energy;
  return -e;
}

double total_energy(const LimitState& s, const ForceData& fd,
                    const MaterialParams& m) {
  return assemble(s.disc->plate, s.disc->rod, s.disc->dm, s.dofs, &fd, m,
                  energy_opts(true, true, true, true))
      .energy;
}

double load_functional_quadrature(const LimitState& s, const ForceData& fd,
                                  int oversample) {
  const PlateMesh& plate = s.disc->plate;
  const RodMesh& rod = s.disc->rod;
  const GaussRule pbase = gauss_legendre(plate.gauss_order);
  double acc = 0.0;
  for (int e = 0; e < plate.n_elems(); ++e) {
    int ex, ey;
    plate.elem_cell(e, ex, ey);
    const GaussRule gx = mapped_rule(pbase, plate.node_x(ex), plate.node_x(ex + 1));
    const GaussRule gy = mapped_rule(pbase, plate.node_y(ey), plate.node_y(ey + 1));
    for (std::size_t a = 0; a < gx.nodes.size(); ++a)
      for (std::size_t b = 0; b < gy.nodes.size(); ++b) {
        const PlatePointEval pe = eval_plate_state(plate, s.disc->dm, s.dofs,
                                                   gx.nodes[a], gy.nodes[b]);
        const Vec3 fp = fd.f_p_at(gx.nodes[a], gy.nodes[b]);
        acc += gx.weights[a] * gy.weights[b] * 2.0 *
               (fp(0) * pe.u1 + fp(1) * pe.u2 + fp(2) * pe.w);
      }
  }
  const GaussRule rbase = gauss_legendre(std::max(rod.gauss_order, oversample));
  const double cG = moment_load_coef();
  for (int e = 0; e < rod.n_elems; ++e) {
    const GaussRule g = mapped_rule(rbase, rod.node_x(e), rod.node_x(e + 1));
    for (std::size_t k = 0; k < g.nodes.size(); ++k) {
      const double x3 = g.nodes[k];
      const RodPointEval re = eval_rod_state(rod, s.disc->dm, s.dofs, x3);
      const Vec3 fr = fd.f_r_at(x3);
      const Vec3 g1 = fd.g1_at(x3);
      const Vec3 g2 = fd.g2_at(x3);
      const double W3 = recover_W3(s, x3);
      double v = M_PI * (fr(0) * re.W1 + fr(1) * re.W2 + fr(2) * W3);
      v += cG * (g1(1) * re.Q3 - g1(2) * re.dW1 - g2(0) * re.Q3 - g2(2) * re.dW2);
      acc += g.weights[k] * v;
    }
  }
  return acc;
}

Eigen::VectorXd gradient(const LimitState& s, const ForceData& fd,
                         const MaterialParams& m) {
  AssemblyOptions o;
  o.gradient = true;
  return assemble(s.disc->plate, s.disc->rod, s.disc->dm, s.dofs, &fd, m, o)
      .grad;
}

Vec3 optimal_plate_warping(const LimitState& s, const MaterialParams& m,
                           double x1, double x2, double X3) {
  const PlatePointEval e =
      eval_plate_state(s.disc->plate, s.disc->dm, s.dofs, x1, x2);
  const MembraneStrain z = membrane_strain(s, x1, x2);
  const double lap = e.d2w[0] + e.d2w[2];
  const double nu = m.poisson;
  const double w3 =
      nu / (1.0 - nu) * ((X3 * X3 / 2.0 - 1.0 / 6.0) * lap - X3 * z.trace());
  return {0.0, 0.0, w3};
}

Vec3 optimal_rod_warping(const LimitState& s, const MaterialParams& m,
                         double X1, double X2, double x3) {
  const RodPointEval e = eval_rod_state(s.disc->rod, s.disc->dm, s.dofs, x3);
  const double nu = m.poisson;
  const double v1 =
      -nu * ((X2 * X2 - X1 * X1) / 2.0 * e.d2W1 - X1 * X2 * e.d2W2);
  const double v2 =
      -nu * ((X1 * X1 - X2 * X2) / 2.0 * e.d2W2 - X1 * X2 * e.d2W1);
  return {v1, v2, 0.0};
}

Sym3 limit_strain_plate(const LimitState& s, const MaterialParams& m,
                        double x1, double x2, double X3) {
  const PlatePointEval e =
      eval_plate_state(s.disc->plate, s.disc->dm, s.dofs, x1, x2);
  const MembraneStrain z = membrane_strain(s, x1, x2);
  const double nu = m.poisson;
  Sym3 E;
  E.a11 = -X3 * e.d2w[0] + z.Z11;
  E.a12 = -X3 * e.d2w[1] + z.Z12;
  E.a22 = -X3 * e.d2w[2] + z.Z22;
  // X3-derivative of the optimal warping; the transverse shears vanish there.
  const double lap = e.d2w[0] + e.d2w[2];
  E.a33 = nu / (1.0 - nu) * (X3 * lap - z.trace());
  E.a13 = E.a23 = 0.0;
  return E;
}

Sym3 limit_strain_rod(const LimitState& s, const MaterialParams& m, double X1,
                      double X2, double x3) {
  const RodPointEval e = eval_rod_state(s.disc->rod, s.disc->dm, s.dofs, x3);
  const double nu = m.poisson;
  const double axial = -X1 * e.d2W1 - X2 * e.d2W2;
  Sym3 E;
  // in-plane entries are the symmetric gradient of the optimal warping
  E.a11 = -nu * axial;
  E.a22 = -nu * axial;
  E.a12 = 0.0;
  E.a13 = -0.5 * X2 * e.dQ3;
  E.a23 = 0.5 * X1 * e.dQ3;
  E.a33 = axial;
  return E;
}

double plate_energy_from_strain(const LimitState& s, const MaterialParams& m,
                                const ThinQuadrature& q) {
  double acc = 0.0;
  for (const auto& p : q.plate) {
    const Sym3 E = limit_strain_plate(s, m, p.x1, p.x2, p.X3);
    acc += p.w * quadratic_form_Q(E.scaled(2.0), m);
  }
  return acc;
}

double rod_energy_from_strain(const LimitState& s, const MaterialParams& m,
                              const ThinQuadrature& q) {
  double acc = 0.0;
  for (const auto& p : q.rod) {
    const Sym3 E = limit_strain_rod(s, m, p.X1, p.X2, p.x3);
    acc += p.w * quadratic_form_Q(E.scaled(2.0), m);
  }
  return acc;
}

}  // namespace plarod
