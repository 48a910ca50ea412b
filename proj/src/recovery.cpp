#include "plarod/recovery.hpp"

#include <cmath>
#include <stdexcept>

#include "plarod/parallel.hpp"
#include "plarod/quadrature.hpp"

namespace plarod {

// ---------------------------------------------------------------------------
// blends
// ---------------------------------------------------------------------------

namespace {
// 6u^5 - 15u^4 + 10u^3 on [0,1]
inline double smooth5(double u) { return ((6 * u - 15) * u + 10) * u * u * u; }
inline double smooth5_d1(double u) { return ((30 * u - 60) * u + 30) * u * u; }
inline double smooth5_d2(double u) { return ((120 * u - 180) * u + 60) * u; }
inline double smooth5_d3(double u) { return (360 * u - 360) * u + 60; }
}  // namespace

double plateau_blend(double s) {
  if (s <= 1.0) return 0.0;
  if (s >= 2.0) return 1.0;
  return smooth5(s - 1.0);
}
double plateau_blend_d1(double s) {
  if (s <= 1.0 || s >= 2.0) return 0.0;
  return smooth5_d1(s - 1.0);
}
double plateau_blend_d2(double s) {
  if (s <= 1.0 || s >= 2.0) return 0.0;
  return smooth5_d2(s - 1.0);
}
double plateau_blend_d3(double s) {
  if (s <= 1.0 || s >= 2.0) return 0.0;
  return smooth5_d3(s - 1.0);
}

// ---------------------------------------------------------------------------
// smoothed state
// ---------------------------------------------------------------------------

SmoothedLimitState::PlateEval SmoothedLimitState::plate(double x1,
                                                        double x2) const {
  const auto& d = *base->disc;
  const PlatePointEval raw = eval_plate_state(d.plate, d.dm, base->dofs, x1, x2);
  PlateEval out;
  const double r = std::sqrt(x1 * x1 + x2 * x2);
  const double s = r / rho;
  if (s >= 2.0) {
    out.u1 = raw.u1;
    out.u2 = raw.u2;
    out.du1 = raw.du1;
    out.du2 = raw.du2;
    out.w = raw.w;
    out.dw = raw.dw;
    out.d2w = raw.d2w;
    return out;
  }
  const double T = u3_O + grad_u3_O(0) * x1 + grad_u3_O(1) * x2;
  if (s <= 1.0) {
    out.u1 = u1_O;
    out.u2 = u2_O;
    out.w = T;
    out.dw = grad_u3_O;
    return out;  // derivatives of the affine plateau: zero curvature
  }
  // blend annulus: c and its derivatives in x
  const double c = plateau_blend(s);
  const double c1 = plateau_blend_d1(s);
  const double c2 = plateau_blend_d2(s);
  const Vec2 nvec(x1 / r, x2 / r);
  const Vec2 dc = (c1 / rho) * nvec;
  std::array<double, 3> d2c{};  // xx, xy, yy
  {
    const double q2 = c2 / (rho * rho), q1 = c1 / (rho * r);
    d2c[0] = q2 * nvec(0) * nvec(0) + q1 * (1.0 - nvec(0) * nvec(0));
    d2c[1] = q2 * nvec(0) * nvec(1) - q1 * nvec(0) * nvec(1);
    d2c[2] = q2 * nvec(1) * nvec(1) + q1 * (1.0 - nvec(1) * nvec(1));
  }
  const double g = raw.w - T;
  const Vec2 dg = raw.dw - grad_u3_O;
  out.w = T + c * g;
  out.dw = grad_u3_O + g * dc + c * dg;
  out.d2w[0] = d2c[0] * g + 2 * dc(0) * dg(0) + c * raw.d2w[0];
  out.d2w[1] = d2c[1] * g + dc(0) * dg(1) + dc(1) * dg(0) + c * raw.d2w[1];
  out.d2w[2] = d2c[2] * g + 2 * dc(1) * dg(1) + c * raw.d2w[2];
  const double h1 = raw.u1 - u1_O, h2 = raw.u2 - u2_O;
  out.u1 = u1_O + c * h1;
  out.u2 = u2_O + c * h2;
  out.du1 = h1 * dc + c * raw.du1;
  out.du2 = h2 * dc + c * raw.du2;
  return out;
}

SmoothedLimitState::RodEval SmoothedLimitState::rod(double x3) const {
  const auto& d = *base->disc;
  RodEval out;
  const double s = x3 / rho;
  if (s <= 1.0) return out;  // plateau: all rod fields vanish
  const RodPointEval raw = eval_rod_state(d.rod, d.dm, base->dofs, x3);
  if (s >= 2.0) {
    out.W1 = raw.W1;
    out.dW1 = raw.dW1;
    out.d2W1 = raw.d2W1;
    out.d3W1 = raw.d3W1;
    out.W2 = raw.W2;
    out.dW2 = raw.dW2;
    out.d2W2 = raw.d2W2;
    out.d3W2 = raw.d3W2;
    out.Q3 = raw.Q3;
    out.dQ3 = raw.dQ3;
    return out;
  }
  const double xi = plateau_blend(s);
  const double xi1 = plateau_blend_d1(s) / rho;
  const double xi2 = plateau_blend_d2(s) / (rho * rho);
  const double xi3 = plateau_blend_d3(s) / (rho * rho * rho);
  out.W1 = xi * raw.W1;
  out.dW1 = xi1 * raw.W1 + xi * raw.dW1;
  out.d2W1 = xi2 * raw.W1 + 2 * xi1 * raw.dW1 + xi * raw.d2W1;
  out.d3W1 = xi3 * raw.W1 + 3 * xi2 * raw.dW1 + 3 * xi1 * raw.d2W1 + xi * raw.d3W1;
  out.W2 = xi * raw.W2;
  out.dW2 = xi1 * raw.W2 + xi * raw.dW2;
  out.d2W2 = xi2 * raw.W2 + 2 * xi1 * raw.dW2 + xi * raw.d2W2;
  out.d3W2 = xi3 * raw.W2 + 3 * xi2 * raw.dW2 + 3 * xi1 * raw.d2W2 + xi * raw.d3W2;
  out.Q3 = xi * raw.Q3;
  out.dQ3 = xi1 * raw.Q3 + xi * raw.dQ3;
  return out;
}

double SmoothedLimitState::recovered_W3(double x3) const {
  const double L = base->disc->rod.length;
  if (x3 < 0 || x3 > L * (1 + 1e-12))
    throw std::invalid_argument("recovered_W3: x3 outside [0, L]");
  if (x3 == 0.0) return u3_O;
  const int nsub = std::max(32, 8 * base->disc->rod.n_elems);
  const double acc = integrate_composite(
      [&](double t) {
        const RodEval e = rod(t);
        return e.dW1 * e.dW1 + e.dW2 * e.dW2;
      },
      0.0, x3, nsub, 5);
  return u3_O - 0.5 * acc;
}

SmoothedLimitState smooth_state(const LimitState& s, int n,
                                const MaterialParams& m, const ForceData* fd) {
  if (n < 2) throw std::invalid_argument("smooth_state: n >= 2");
  const auto& plate = s.disc->plate;
  if (2.0 / n >= std::min(plate.a1, plate.a2))
    throw std::invalid_argument(
        "smooth_state: plateau+blend 2/n must fit strictly inside omega");
  if (2.0 / n >= s.disc->rod.length)
    throw std::invalid_argument("smooth_state: plateau+blend 2/n exceeds the rod");
  SmoothedLimitState ss;
  ss.base = &s;
  ss.n = n;
  ss.rho = 1.0 / n;
  const int o = plate.origin_node;
  ss.u1_O = s.dofs(s.disc->dm.plate_dof(o, 0));
  ss.u2_O = s.dofs(s.disc->dm.plate_dof(o, 1));
  ss.u3_O = s.dofs(s.disc->dm.plate_dof(o, 2));
  ss.grad_u3_O =
      Vec2(s.dofs(s.disc->dm.plate_dof(o, 3)), s.dofs(s.disc->dm.plate_dof(o, 4)));

  const double je_orig =
      fd ? total_energy(s, *fd, m) : plate_energy(s, m) + rod_energy(s, m);
  const double je_smooth =
      fd ? smoothed_total_energy(ss, *fd, m)
         : smoothed_plate_energy(ss, m) + smoothed_rod_energy(ss, m);
  ss.energy_change = std::abs(je_smooth - je_orig);
  return ss;
}

// ---------------------------------------------------------------------------
// smoothed-state limit energies (oversampled quadrature)
// ---------------------------------------------------------------------------

namespace {

// 2x2 subcells with Gauss 5 per plate element: the blend is only C^2.
template <class F>
double plate_quad(const PlateMesh& mesh, const F& f) {
  const GaussRule base = gauss_legendre(5);
  double acc = 0.0;
  for (int e = 0; e < mesh.n_elems(); ++e) {
    int ex, ey;
    mesh.elem_cell(e, ex, ey);
    for (int sx = 0; sx < 2; ++sx)
      for (int sy = 0; sy < 2; ++sy) {
        const double x0 = mesh.node_x(ex) + 0.5 * sx * mesh.hx;
        const double y0 = mesh.node_y(ey) + 0.5 * sy * mesh.hy;
        const GaussRule gx = mapped_rule(base, x0, x0 + 0.5 * mesh.hx);
        const GaussRule gy = mapped_rule(base, y0, y0 + 0.5 * mesh.hy);
        for (std::size_t a = 0; a < gx.nodes.size(); ++a)
          for (std::size_t b = 0; b < gy.nodes.size(); ++b)
            acc += gx.weights[a] * gy.weights[b] * f(gx.nodes[a], gy.nodes[b]);
      }
  }
  return acc;
}

template <class F>
double rod_quad(const RodMesh& mesh, const F& f) {
  return integrate_composite(f, 0.0, mesh.length, 4 * mesh.n_elems, 5);
}

}  // namespace

double smoothed_plate_energy(const SmoothedLimitState& ss,
                             const MaterialParams& m) {
  const double nu = m.poisson;
  const double cB = plate_bending_coef(m), cM = plate_membrane_coef(m);
  return plate_quad(ss.base->disc->plate, [&](double x1, double x2) {
    const auto e = ss.plate(x1, x2);
    const double H11 = e.d2w[0], H12 = e.d2w[1], H22 = e.d2w[2];
    const double Z11 = e.du1(0) + 0.5 * e.dw(0) * e.dw(0);
    const double Z22 = e.du2(1) + 0.5 * e.dw(1) * e.dw(1);
    const double Z12 = 0.5 * (e.du1(1) + e.du2(0)) + 0.5 * e.dw(0) * e.dw(1);
    const double trH = H11 + H22, trZ = Z11 + Z22;
    return cB * ((1 - nu) * (H11 * H11 + 2 * H12 * H12 + H22 * H22) +
                 nu * trH * trH) +
           cM * ((1 - nu) * (Z11 * Z11 + 2 * Z12 * Z12 + Z22 * Z22) +
                 nu * trZ * trZ);
  });
}

double smoothed_rod_energy(const SmoothedLimitState& ss,
                           const MaterialParams& m) {
  const double cRB = rod_bending_coef(m), cT = rod_torsion_coef(m);
  return rod_quad(ss.base->disc->rod, [&](double x3) {
    const auto e = ss.rod(x3);
    return cRB * (e.d2W1 * e.d2W1 + e.d2W2 * e.d2W2) + cT * e.dQ3 * e.dQ3;
  });
}

double smoothed_load(const SmoothedLimitState& ss, const ForceData& fd) {
  const double cG = moment_load_coef();
  double acc = plate_quad(ss.base->disc->plate, [&](double x1, double x2) {
    const auto e = ss.plate(x1, x2);
    const Vec3 fp = fd.f_p_at(x1, x2);
    return 2.0 * (fp(0) * e.u1 + fp(1) * e.u2 + fp(2) * e.w);
  });
  acc += M_PI * antiderivative_Fr3(fd, 0.0) * ss.u3_O;
  acc += rod_quad(ss.base->disc->rod, [&](double x3) {
    const auto e = ss.rod(x3);
    const Vec3 fr = fd.f_r_at(x3);
    const Vec3 g1 = fd.g1_at(x3);
    const Vec3 g2 = fd.g2_at(x3);
    const double F = antiderivative_Fr3(fd, x3);
    double v = M_PI * (fr(0) * e.W1 + fr(1) * e.W2);
    v -= 0.5 * M_PI * F * (e.dW1 * e.dW1 + e.dW2 * e.dW2);
    v += cG * (g1(1) * e.Q3 - g1(2) * e.dW1 - g2(0) * e.Q3 - g2(2) * e.dW2);
    return v;
  });
  return acc;
}

double smoothed_total_energy(const SmoothedLimitState& ss, const ForceData& fd,
                             const MaterialParams& m) {
  return smoothed_plate_energy(ss, m) + smoothed_rod_energy(ss, m) -
         smoothed_load(ss, fd);
}

// ---------------------------------------------------------------------------
// rotation field
// ---------------------------------------------------------------------------

Mat3 rodrigues(const Vec3& axis) {
  const double th = axis.norm();
  Mat3 A;
  A << 0, -axis(2), axis(1), axis(2), 0, -axis(0), -axis(1), axis(0), 0;
  double c1, c2;
  if (th < 1e-6) {
    c1 = 1.0 - th * th / 6.0;
    c2 = 0.5 - th * th / 24.0;
  } else {
    c1 = std::sin(th) / th;
    c2 = (1.0 - std::cos(th)) / (th * th);
  }
  return Mat3::Identity() + c1 * A + c2 * A * A;
}

namespace {

// columns of int_0^x exp(t A_v) dt - x I  (used on (Rbar - I) e3 integrals)
Vec3 exp_integral_minus_x_e3(const Vec3& v, double x) {
  const double a = v.norm();
  Mat3 A;
  A << 0, -v(2), v(1), v(2), 0, -v(0), -v(1), v(0), 0;
  double c1, c2;
  if (a < 1e-6) {
    c1 = x * x / 2.0 - a * a * x * x * x * x / 24.0;
    c2 = x * x * x / 6.0;
  } else {
    c1 = (1.0 - std::cos(a * x)) / (a * a);
    c2 = (x - std::sin(a * x) / a) / (a * a);
  }
  return c1 * (A * Vec3::UnitZ()) + c2 * (A * (A * Vec3::UnitZ()));
}

Vec3 generator_at(const SmoothedLimitState& ss, double delta, const Vec3& tilt,
                  double x3) {
  const auto e = ss.rod(x3);
  return std::sqrt(delta) * Vec3(-e.d2W2, e.d2W1, e.dQ3) + delta * tilt;
}

}  // namespace

Mat3 step_rotation_ode(const std::function<Vec3(double)>& gen, double x0,
                       double x1, int steps) {
  Eigen::Quaterniond q = Eigen::Quaterniond::Identity();
  const double h = (x1 - x0) / steps;
  for (int k = 0; k < steps; ++k) {
    const double mid = x0 + (k + 0.5) * h;
    const Eigen::Quaterniond dq(rodrigues(gen(mid) * h));
    q = (dq * q).normalized();
  }
  return q.toRotationMatrix();
}

Mat3 RotationField::Rbar(double x3) const { return rodrigues(delta * tilt * x3); }

Vec3 RotationField::Wbar_int(double x3) const {
  return exp_integral_minus_x_e3(delta * tilt, x3);
}

Vec3 RotationField::frozen_generator(double x3) const {
  if (x3 <= rho) return delta * tilt;
  int k = static_cast<int>((x3 - rho) / h);
  k = std::min(k, static_cast<int>(gen_steps.size()) - 1);
  return gen_steps[static_cast<std::size_t>(k)];
}

Mat3 RotationField::R(double x3) const {
  if (x3 <= rho) return Rbar(x3);  // plateau: closed-form exponential
  int k = static_cast<int>((x3 - rho) / h);
  k = std::min(k, static_cast<int>(gen_steps.size()) - 1);
  const double xk = rho + k * h;
  const Mat3 Rk = steps[static_cast<std::size_t>(k)].toRotationMatrix();
  if (x3 <= xk) return Rk;
  return rodrigues(gen_steps[static_cast<std::size_t>(k)] * (x3 - xk)) * Rk;
}

Vec3 RotationField::Wint(double x3) const {
  if (x3 <= rho) return Wbar_int(x3);
  int k = static_cast<int>((x3 - rho) / h);
  k = std::min(k, static_cast<int>(steps.size()) - 1);
  const double xk = rho + k * h;
  Vec3 acc = wint_steps[static_cast<std::size_t>(k)];
  if (x3 > xk) {
    const GaussRule g = mapped_rule(gauss_legendre(5), xk, x3);
    for (std::size_t i = 0; i < g.nodes.size(); ++i)
      acc += g.weights[i] * (R(g.nodes[i]) * Vec3::UnitZ() - Vec3::UnitZ());
  }
  return acc;
}

double RotationField::max_orthogonality_defect(int samples) const {
  double worst = 0.0;
  for (int i = 0; i <= samples; ++i) {
    const double x3 = -rho + (length + rho) * i / samples;
    const Mat3 Rm = R(x3);
    worst = std::max(worst,
                     (Rm.transpose() * Rm - Mat3::Identity()).cwiseAbs().maxCoeff());
    worst = std::max(worst, std::abs(Rm.determinant() - 1.0));
  }
  return worst;
}

RotationField integrate_rotation(const SmoothedLimitState& ss, double delta,
                                 int steps_per_unit) {
  if (!(delta > 0 && delta <= ss.rho))
    throw std::invalid_argument("integrate_rotation: require 0 < delta <= 1/n");
  RotationField rf;
  rf.delta = delta;
  rf.rho = ss.rho;
  rf.length = ss.base->disc->rod.length;
  rf.ss = &ss;
  rf.tilt = Vec3(ss.grad_u3_O(1), -ss.grad_u3_O(0), 0.0);

  const double span = rf.length - rf.rho;
  const int nsteps = std::max(16, static_cast<int>(std::ceil(span * steps_per_unit)));
  rf.h = span / nsteps;
  rf.steps.resize(static_cast<std::size_t>(nsteps) + 1);
  rf.wint_steps.resize(static_cast<std::size_t>(nsteps) + 1);
  rf.gen_steps.resize(static_cast<std::size_t>(nsteps));
  rf.steps[0] = Eigen::Quaterniond(rf.Rbar(rf.rho)).normalized();
  rf.wint_steps[0] = rf.Wbar_int(rf.rho);
  const GaussRule g5 = gauss_legendre(5);
  for (int k = 0; k < nsteps; ++k) {
    const double xk = rf.rho + k * rf.h;
    const Vec3 Fm = generator_at(ss, delta, rf.tilt, xk + 0.5 * rf.h);
    rf.gen_steps[static_cast<std::size_t>(k)] = Fm;
    const Mat3 Rk = rf.steps[static_cast<std::size_t>(k)].toRotationMatrix();
    // cumulative integral of (R - I) e3 over the step, consistent with R()
    Vec3 seg = Vec3::Zero();
    const GaussRule g = mapped_rule(g5, xk, xk + rf.h);
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
      const Mat3 Ri = rodrigues(Fm * (g.nodes[i] - xk)) * Rk;
      seg += g.weights[i] * (Ri * Vec3::UnitZ() - Vec3::UnitZ());
    }
    rf.wint_steps[static_cast<std::size_t>(k) + 1] =
        rf.wint_steps[static_cast<std::size_t>(k)] + seg;
    const Eigen::Quaterniond dq(rodrigues(Fm * rf.h));
    rf.steps[static_cast<std::size_t>(k) + 1] =
        (dq * rf.steps[static_cast<std::size_t>(k)]).normalized();
  }
  return rf;
}

// ---------------------------------------------------------------------------
// recovery field
// ---------------------------------------------------------------------------

namespace {

struct PlateWarp {
  double u3 = 0;       // third component of the warping at (x1,x2,X3)
  double dX3 = 0;      // d/dX3
  Vec2 dxy = Vec2::Zero();
};

// Optimal transverse warping from the raw state, cut off to vanish on the
// plateau disc and within edge_width of the rim.
PlateWarp plate_warping(const RecoveryField& rf, double x1, double x2,
                        double X3) {
  PlateWarp out;
  const double nu = rf.m.poisson;
  if (nu == 0.0) return out;
  const auto& d = *rf.ss->base->disc;
  const double r = std::sqrt(x1 * x1 + x2 * x2);
  const double s = r / rf.rho;
  // plateau cutoff
  double c = plateau_blend(s);
  Vec2 dc = Vec2::Zero();
  if (s > 1.0 && s < 2.0)
    dc = (plateau_blend_d1(s) / (rf.rho * r)) * Vec2(x1, x2);
  // rim cutoff
  const double w_e = rf.edge_width;
  const double t1 = (d.plate.a1 - std::abs(x1)) / w_e;
  const double t2 = (d.plate.a2 - std::abs(x2)) / w_e;
  const double e1 = t1 >= 1.0 ? 1.0 : smooth5(std::max(t1, 0.0));
  const double e2 = t2 >= 1.0 ? 1.0 : smooth5(std::max(t2, 0.0));
  Vec2 de = Vec2::Zero();
  if (t1 > 0.0 && t1 < 1.0)
    de(0) = smooth5_d1(t1) * (x1 >= 0 ? -1.0 : 1.0) / w_e * e2;
  if (t2 > 0.0 && t2 < 1.0)
    de(1) = smooth5_d1(t2) * (x2 >= 0 ? -1.0 : 1.0) / w_e * e1;
  const double zeta = c * e1 * e2;
  const Vec2 dzeta = dc * e1 * e2 + c * de;
  if (zeta == 0.0 && dzeta.isZero()) return out;

  const PlatePointEval raw =
      eval_plate_state(d.plate, d.dm, rf.ss->base->dofs, x1, x2, true);
  const double lap = raw.d2w[0] + raw.d2w[2];
  const Vec2 dlap(raw.d3w[0] + raw.d3w[2], raw.d3w[1] + raw.d3w[3]);
  const double trZ = raw.du1(0) + raw.du2(1) +
                     0.5 * (raw.dw(0) * raw.dw(0) + raw.dw(1) * raw.dw(1));
  const Vec2 dtrZ(
      raw.d2u1[0] + raw.d2u2[1] + raw.dw(0) * raw.d2w[0] + raw.dw(1) * raw.d2w[1],
      raw.d2u1[1] + raw.d2u2[2] + raw.dw(0) * raw.d2w[1] + raw.dw(1) * raw.d2w[2]);

  const double kpa = nu / (1.0 - nu);
  const double A = zeta * lap, B = zeta * trZ;
  const Vec2 dA = dzeta * lap + zeta * dlap;
  const Vec2 dB = dzeta * trZ + zeta * dtrZ;
  const double poly = X3 * X3 / 2.0 - 1.0 / 6.0;
  out.u3 = kpa * (poly * A - X3 * B);
  out.dX3 = kpa * (X3 * A - B);
  out.dxy = kpa * (poly * dA - X3 * dB);
  return out;
}

struct RodWarp {
  Vec3 v = Vec3::Zero();
  Vec3 dX1 = Vec3::Zero(), dX2 = Vec3::Zero(), dx3 = Vec3::Zero();
};

RodWarp rod_warping(const RecoveryField& rf, double X1, double X2, double x3) {
  RodWarp out;
  const double nu = rf.m.poisson;
  if (nu == 0.0) return out;
  if (x3 <= rf.rho) return out;
  const SmoothedLimitState::RodEval e = rf.ss->rod(x3);
  const double a1 = e.d2W1, a2 = e.d2W2;
  const double b1 = e.d3W1, b2 = e.d3W2;
  const double p1 = (X2 * X2 - X1 * X1) / 2.0, p2 = -X1 * X2;
  out.v(0) = -nu * (p1 * a1 + p2 * a2);
  out.v(1) = -nu * (-p1 * a2 + p2 * a1);
  out.dX1(0) = -nu * (-X1 * a1 - X2 * a2);
  out.dX2(0) = -nu * (X2 * a1 - X1 * a2);
  out.dX1(1) = -nu * (X1 * a2 - X2 * a1);
  out.dX2(1) = -nu * (-X2 * a2 - X1 * a1);
  out.dx3(0) = -nu * (p1 * b1 + p2 * b2);
  out.dx3(1) = -nu * (-p1 * b2 + p2 * b1);
  return out;
}

}  // namespace

RecoveryField build_recovery(const SmoothedLimitState& ss, double delta,
                             const MaterialParams& m, double edge_width) {
  if (!(delta > 0.0 && delta <= ss.rho))
    throw std::invalid_argument(
        "build_recovery: matching requires 0 < delta <= 1/n");
  RecoveryField rf;
  rf.ss = &ss;
  rf.m = m;
  rf.delta = delta;
  rf.rho = ss.rho;
  rf.edge_width = edge_width;
  rf.rot = integrate_rotation(ss, delta);
  return rf;
}

Vec3 RecoveryField::eval_plate(const Vec3& x) const {
  const double d = delta, X3 = x(2) / d;
  const auto e = ss->plate(x(0), x(1));
  const PlateWarp wp = plate_warping(*this, x(0), x(1), X3);
  return {x(0) + d * d * (e.u1 - X3 * e.dw(0)),
          x(1) + d * d * (e.u2 - X3 * e.dw(1)), x(2) + d * e.w + d * d * d * wp.u3};
}

Mat3 RecoveryField::grad_plate(const Vec3& x) const {
  const double d = delta, X3 = x(2) / d;
  const auto e = ss->plate(x(0), x(1));
  const PlateWarp wp = plate_warping(*this, x(0), x(1), X3);
  Mat3 F;
  F(0, 0) = 1 + d * d * (e.du1(0) - X3 * e.d2w[0]);
  F(0, 1) = d * d * (e.du1(1) - X3 * e.d2w[1]);
  F(0, 2) = -d * e.dw(0);
  F(1, 0) = d * d * (e.du2(0) - X3 * e.d2w[1]);
  F(1, 1) = 1 + d * d * (e.du2(1) - X3 * e.d2w[2]);
  F(1, 2) = -d * e.dw(1);
  F(2, 0) = d * e.dw(0) + d * d * d * wp.dxy(0);
  F(2, 1) = d * e.dw(1) + d * d * d * wp.dxy(1);
  F(2, 2) = 1 + d * d * wp.dX3;
  return F;
}

Vec3 RecoveryField::eval_rod(const Vec3& x) const {
  const double d = delta;
  const double x3 = x(2);
  const Vec3 xperp(x(0), x(1), 0.0);
  const Vec3 g3(ss->grad_u3_O(0), ss->grad_u3_O(1), 0.0);
  // junction-cylinder extension of the plate displacement
  Vec3 v = x;
  v(0) += d * d * ss->u1_O - d * x3 * g3(0);
  v(1) += d * d * ss->u2_O - d * x3 * g3(1);
  v(2) += d * (ss->u3_O + x(0) * g3(0) + x(1) * g3(1));
  // center-line and section-rotation parts relative to the matched correction
  v += rot.Wint(x3) - rot.Wbar_int(x3);
  v += (rot.R(x3) - rot.Rbar(x3)) * xperp;
  const RodWarp wr = rod_warping(*this, x(0) / d, x(1) / d, x3);
  v += std::pow(d, 2.5) * wr.v;
  return v;
}

Mat3 RecoveryField::grad_rod(const Vec3& x) const {
  const double d = delta;
  const double x3 = x(2);
  const Vec3 xperp(x(0), x(1), 0.0);
  const Mat3 Rm = rot.R(x3);
  const Mat3 Rb = rot.Rbar(x3);
  const RodWarp wr = rod_warping(*this, x(0) / d, x(1) / d, x3);
  const double d32 = std::pow(d, 1.5);
  Mat3 F = Mat3::Identity();
  F.col(0) += (Rm - Rb) * Vec3::UnitX() + d32 * wr.dX1;
  F.col(1) += (Rm - Rb) * Vec3::UnitY() + d32 * wr.dX2;
  F(2, 0) += d * ss->grad_u3_O(0);
  F(2, 1) += d * ss->grad_u3_O(1);
  // axial column: (R - Rbar) e3 + (A_F R - delta A_tilt Rbar) xperp - d*g3
  const Vec3 Fgen = rot.frozen_generator(x3);
  Vec3 c3 = (Rm - Rb) * Vec3::UnitZ();
  c3 += Fgen.cross(Rm * xperp) - d * rot.tilt.cross(Rb * xperp);
  c3(0) -= d * ss->grad_u3_O(0);
  c3(1) -= d * ss->grad_u3_O(1);
  c3 += std::pow(d, 2.5) * wr.dx3;
  F.col(2) += c3;
  return F;
}

// ---------------------------------------------------------------------------
// rescaled energy and sweep
// ---------------------------------------------------------------------------

RescaledEnergy rescaled_energy(const RecoveryField& rf, const ForceData& fd,
                               const MaterialParams& m, const ThinQuadrature& q,
                               int threads) {
  const double d = rf.delta;
  const double d5 = std::pow(d, 5);
  struct Partial {
    double el = 0, lo = 0;
    long bad = 0;
  };
  const std::size_t np = q.plate.size(), nr = q.rod.size();
  const std::size_t total = np + nr;
  const std::size_t chunk = 64;
  const std::size_t nchunks = (total + chunk - 1) / chunk;
  std::vector<Partial> parts(nchunks);

  parallel_for(nchunks, threads, [&](std::size_t c) {
    Partial& p = parts[c];
    const std::size_t b = c * chunk, e = std::min(b + chunk, total);
    for (std::size_t i = b; i < e; ++i) {
      if (i < np) {
        const auto& gp = q.plate[i];
        const Vec3 x(gp.x1, gp.x2, d * gp.X3);
        const Mat3 F = rf.grad_plate(x);
        const auto wdens = svk_density(F, m);
        const double w3d = gp.w * d;  // dx3 = delta dX3
        if (!wdens) {
          ++p.bad;
        } else {
          p.el += w3d * *wdens;
        }
        const Vec3 u = rf.eval_plate(x) - x;
        p.lo += w3d * eval_f_delta(fd, x, d, ForceRegion::Plate).dot(u);
      } else {
        const auto& gp = q.rod[i - np];
        if (gp.excluded) continue;
        const Vec3 x(d * gp.X1, d * gp.X2, gp.x3);
        const Mat3 F = rf.grad_rod(x);
        const auto wdens = svk_density(F, m);
        const double w3d = gp.w * d * d;  // dx1 dx2 = delta^2 dX1 dX2
        if (!wdens) {
          ++p.bad;
        } else {
          p.el += w3d * *wdens;
        }
        const Vec3 u = rf.eval_rod(x) - x;
        p.lo += w3d * eval_f_delta(fd, x, d, ForceRegion::Rod).dot(u);
      }
    }
  });

  RescaledEnergy out;
  for (const auto& p : parts) {
    out.elastic += p.el;
    out.load += p.lo;
    out.bad_points += p.bad;
  }
  out.elastic /= d5;
  out.load /= d5;
  out.physical = out.bad_points == 0;
  if (!out.physical) {
    out.elastic = out.load = out.total =
        std::numeric_limits<double>::quiet_NaN();
  } else {
    out.total = out.elastic - out.load;
  }
  return out;
}

std::vector<SweepRow> delta_sweep(const LimitState& s, const ForceData& fd,
                                  const MaterialParams& m,
                                  const std::vector<double>& deltas, int n,
                                  int quad_order, int threads,
                                  double edge_width) {
  for (std::size_t i = 0; i + 1 < deltas.size(); ++i)
    if (!(deltas[i] > deltas[i + 1]))
      throw std::invalid_argument("delta_sweep: deltas must decrease strictly");
  for (double d : deltas)
    if (!(d > 0.0 && d <= 1.0 / n))
      throw std::invalid_argument("delta_sweep: every delta must satisfy 0 < delta <= 1/n");

  const SmoothedLimitState ss = smooth_state(s, n, m, &fd);
  const double limitE = smoothed_total_energy(ss, fd, m);

  std::vector<SweepRow> rows;
  for (double d : deltas) {
    const RecoveryField rf = build_recovery(ss, d, m, edge_width);
    const ThinQuadrature q =
        thin_quadrature(s.disc->plate, s.disc->rod, d, quad_order);
    const RescaledEnergy re = rescaled_energy(rf, fd, m, q, threads);
    SweepRow row;
    row.delta = d;
    row.n = n;
    row.elastic = re.elastic;
    row.load = re.load;
    row.total = re.total;
    row.limit_energy = limitE;
    row.physical = re.physical;
    row.gap = re.physical ? std::abs(re.total - limitE)
                          : std::numeric_limits<double>::quiet_NaN();

    // diagnostic seminorm ratios
    double gs2 = 0.0, dd2 = 0.0;
    for (const auto& gp : q.plate) {
      const Mat3 G = rf.grad_plate(Vec3(gp.x1, gp.x2, d * gp.X3)) - Mat3::Identity();
      gs2 += gp.w * d * (G + G.transpose()).squaredNorm();
    }
    for (const auto& gp : q.rod) {
      if (gp.excluded) continue;
      const double dist = dist_SO3(rf.grad_rod(Vec3(d * gp.X1, d * gp.X2, gp.x3)));
      dd2 += gp.w * d * d * dist * dist;
    }
    row.gs_ratio = std::sqrt(gs2) / std::pow(d, 2.5);
    row.dist_ratio = std::sqrt(dd2) / std::pow(d, 2.5);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace plarod
