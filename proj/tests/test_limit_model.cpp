#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "plarod/limit_model.hpp"
#include "plarod/quadrature.hpp"
#include "support.hpp"

using namespace plarod;

namespace {

// interior in-plane ramp u1 = c*x1 without caring about clamping (energies
// and strains never look at the constraint flags)
void set_u1_ramp(LimitState& s, double c) {
  const auto& d = *s.disc;
  for (int j = 0; j <= d.plate.ny; ++j)
    for (int i = 0; i <= d.plate.nx; ++i)
      s.dofs(d.dm.plate_dof(d.plate.node_id(i, j), 0)) = c * d.plate.node_x(i);
}

void set_w_tilt(LimitState& s, double a) {  // w = a*x1
  const auto& d = *s.disc;
  for (int j = 0; j <= d.plate.ny; ++j)
    for (int i = 0; i <= d.plate.nx; ++i) {
      const int n = d.plate.node_id(i, j);
      s.dofs(d.dm.plate_dof(n, 2)) = a * d.plate.node_x(i);
      s.dofs(d.dm.plate_dof(n, 3)) = a;
    }
}

void set_W1_parabola(LimitState& s, double a) {  // W1 = a*x3^2
  const auto& d = *s.disc;
  for (int k = 0; k < d.rod.n_nodes(); ++k) {
    const double x = d.rod.node_x(k);
    s.dofs(d.dm.rod_dof(k, 0)) = a * x * x;
    s.dofs(d.dm.rod_dof(k, 1)) = 2 * a * x;
  }
}

void set_Q3_linear(LimitState& s, double c) {  // Q3 = c*x3
  const auto& d = *s.disc;
  for (int k = 0; k < d.rod.n_nodes(); ++k)
    s.dofs(d.dm.rod_dof(k, 4)) = c * d.rod.node_x(k);
}

}  // namespace

TEST_CASE("membrane strain") {
  const Discretization d = test::default_disc();
  LimitState s(d);
  MembraneStrain z0 = membrane_strain(s, 0.3, -0.4);
  CHECK(z0.Z11 == 0.0);
  CHECK(z0.Z12 == 0.0);
  CHECK(z0.Z22 == 0.0);

  set_u1_ramp(s, 0.25);
  const MembraneStrain z1 = membrane_strain(s, 0.3, -0.4);
  CHECK(z1.Z11 == doctest::Approx(0.25).epsilon(1e-13));
  CHECK(z1.Z12 == doctest::Approx(0.0).epsilon(1e-13));
  CHECK(z1.Z22 == doctest::Approx(0.0).epsilon(1e-13));

  LimitState s2(d);
  set_w_tilt(s2, 0.5);
  const MembraneStrain z2 = membrane_strain(s2, -0.7, 0.2);
  CHECK(z2.Z11 == doctest::Approx(0.125).epsilon(1e-12));  // a^2/2
  CHECK(z2.Z22 == doctest::Approx(0.0).epsilon(1e-13));
}

TEST_CASE("recover_W3") {
  const Discretization d = test::default_disc();
  LimitState s(d);
  s.dofs(d.dm.u3_origin) = 0.7;
  for (double x : {0.0, 0.4, 1.0})
    CHECK(recover_W3(s, x) == doctest::Approx(0.7).epsilon(1e-15));

  // W1' = 2 a x3 gives W3 = -(2a^2/3) x3^3
  const double a = 0.6;
  LimitState s2(d);
  set_W1_parabola(s2, a);
  for (double x : {0.25, 0.5, 1.0})
    CHECK(recover_W3(s2, x) ==
          doctest::Approx(-2.0 * a * a / 3.0 * x * x * x).epsilon(1e-12));
  CHECK(recover_W3(s2, 0.0) == 0.0);  // anchored at U3(0,0) exactly

  // monotone non-increasing and matching an independent trapezoid oracle
  // (two grids + Richardson so the oracle itself resolves 1e-10)
  LimitState s3 = test::random_state(d, 0.4, 8);
  CHECK(recover_W3(s3, 0.0) == s3.u3_at_origin());
  auto qdot = [&](double x) {
    const RodPointEval e = eval_rod_state(d.rod, d.dm, s3.dofs, x);
    return e.dW1 * e.dW1 + e.dW2 * e.dW2;
  };
  // composite trapezoid split at element boundaries (the integrand has
  // derivative kinks there), refined once with Richardson
  auto trapezoid_piece = [&](double a, double b, int n) {
    double acc = 0.5 * (qdot(a) + qdot(b));
    for (int k = 1; k < n; ++k) acc += qdot(a + (b - a) * k / n);
    return acc * (b - a) / n;
  };
  auto trapezoid = [&](double x, int n) {
    double acc = 0.0;
    for (int e = 0; e < d.rod.n_elems; ++e) {
      const double a = d.rod.node_x(e);
      const double b = std::min(d.rod.node_x(e + 1), x);
      if (b <= a) break;
      acc += trapezoid_piece(a, b, n);
      if (b >= x) break;
    }
    return acc;
  };
  double prev = recover_W3(s3, 0.0);
  for (int step = 1; step <= 10; ++step) {
    const double x = 0.1 * step * d.rod.length;
    const double coarse = trapezoid(x, 1000);
    const double fine = trapezoid(x, 2000);
    const double oracle = (4.0 * fine - coarse) / 3.0;
    const double w3 = recover_W3(s3, x);
    CHECK(w3 == doctest::Approx(s3.u3_at_origin() - 0.5 * oracle).epsilon(1e-10));
    CHECK(w3 <= prev + 1e-14);
    prev = w3;
  }
}

TEST_CASE("plate energy special cases") {
  const Discretization d = test::default_disc();
  const MaterialParams m = lame_from_engineering(1.7, 0.28);
  LimitState zero(d);
  CHECK(plate_energy(zero, m) == 0.0);

  // uniform membrane Z11 = c: E c^2 |omega| / (1 - nu^2)
  LimitState s(d);
  const double c = 0.35;
  set_u1_ramp(s, c);
  CHECK(plate_energy(s, m) ==
        doctest::Approx(m.young * c * c * 16.0 / (1.0 - m.poisson * m.poisson))
            .epsilon(1e-12));
}

TEST_CASE("rod energy closed forms") {
  const Discretization d = test::default_disc();
  MaterialParams m = lame_from_engineering(1.0, 0.0);
  LimitState zero(d);
  CHECK(rod_energy(zero, m) == 0.0);

  // W1 = x3^2: (E pi / 8) * 4 * L
  LimitState s(d);
  set_W1_parabola(s, 1.0);
  CHECK(rod_energy(s, m) == doctest::Approx(M_PI / 2.0).epsilon(1e-13));

  // torsion Q3 = x3: (mu pi / 4) * L; the unit-disc section has polar moment
  // J = pi/2 and rigidity mu J, so the line density is (mu pi/4) |Q3'|^2
  MaterialParams m2;
  m2.mu = 1.0;
  m2.lambda = 0.0;
  m2.young = 2.0 * m2.mu;
  m2.poisson = 0.0;
  LimitState s2(d);
  set_Q3_linear(s2, 1.0);
  CHECK(rod_energy(s2, m2) == doctest::Approx(M_PI / 4.0).epsilon(1e-13));
}

TEST_CASE("load functional") {
  const Discretization d = test::default_disc();
  LimitState zero(d);
  ForceData none = test::zero_forces();
  CHECK(load_functional(zero, none) == 0.0);

  // f_p = e3 against a uniform synthetic deflection: 2 * |omega| * 1
  ForceData fp = test::zero_forces();
  fp.f_p[2] = ScalarField::from_expression("1");
  LimitState s(d);
  for (int n = 0; n < d.dm.n_plate_nodes; ++n) s.dofs(d.dm.plate_dof(n, 2)) = 1.0;
  CHECK(load_functional(s, fp) == doctest::Approx(32.0).epsilon(1e-13));

  // f_r = e3 with zero rod state but U3(O) = 1: pi * L through recovered W3
  ForceData fr = test::zero_forces();
  fr.f_r[2] = ScalarField::from_expression("1");
  LimitState s2(d);
  s2.dofs(d.dm.u3_origin) = 1.0;
  CHECK(load_functional(s2, fr) == doctest::Approx(M_PI).epsilon(1e-12));

  // antiderivative form agrees with the literal recovered-W3 quadrature
  // (polynomial data low-degree enough that both rules are exact)
  ForceData mix = test::zero_forces();
  mix.f_p[0] = ScalarField::from_expression("x2");
  mix.f_r[2] = ScalarField::from_expression("0.7");
  mix.f_r[0] = ScalarField::from_expression("x3");
  mix.g1[1] = ScalarField::from_expression("0.3");
  mix.g2[2] = ScalarField::from_expression("x3");
  LimitState s3 = test::random_state(d, 0.3, 21);
  CHECK(load_functional(s3, mix) ==
        doctest::Approx(load_functional_quadrature(s3, mix, 8)).epsilon(1e-10));
}

TEST_CASE("total energy composition") {
  const Discretization d = test::default_disc();
  const MaterialParams m = lame_from_engineering(1.0, 0.3);
  ForceData fd = test::zero_forces();
  fd.f_p[2] = ScalarField::from_expression("sin(x1)*x2");
  fd.f_r[2] = ScalarField::from_expression("0.2");

  LimitState zero(d);
  CHECK(total_energy(zero, fd, m) == 0.0);

  LimitState s = test::random_state(d, 0.2, 5);
  ForceData none = test::zero_forces();
  const double e = total_energy(s, none, m);
  CHECK(e == doctest::Approx(plate_energy(s, m) + rod_energy(s, m)).epsilon(1e-14));
  CHECK(e >= 0.0);

  const double et = total_energy(s, fd, m);
  CHECK(et == doctest::Approx(plate_energy(s, m) + rod_energy(s, m) -
                              load_functional(s, fd))
                  .epsilon(1e-13));
}

TEST_CASE("optimal plate warping") {
  const Discretization d = test::default_disc();
  const MaterialParams m0 = lame_from_engineering(1.0, 0.0);
  LimitState s = test::random_state(d, 0.4, 2);
  CHECK(optimal_plate_warping(s, m0, 0.3, 0.2, 0.5).norm() == 0.0);

  // membrane trace c with flat deflection: component 3 = -nu/(1-nu) X3 c
  const MaterialParams m = lame_from_engineering(1.0, 0.3);
  LimitState s2(d);
  set_u1_ramp(s2, 0.4);
  const double X3 = 0.37;
  const Vec3 w = optimal_plate_warping(s2, m, 0.5, -0.3, X3);
  CHECK(w(0) == 0.0);
  CHECK(w(1) == 0.0);
  CHECK(w(2) == doctest::Approx(-m.poisson / (1 - m.poisson) * X3 * 0.4)
                    .epsilon(1e-12));

  // the quadratic factor X3^2/2 - 1/6 vanishes at X3 = +-1/sqrt(3); at a
  // stationary point of the deflection the membrane trace vanishes too, so
  // the whole warping is zero there even though the curvature is not
  LimitState s3(d);
  for (int j = 0; j <= d.plate.ny; ++j)
    for (int i = 0; i <= d.plate.nx; ++i) {
      const int n = d.plate.node_id(i, j);
      const double x = d.plate.node_x(i), y = d.plate.node_y(j);
      const double px = (x * x - 4.0) * (x * x - 4.0) / 16.0;
      const double py = (y * y - 4.0) * (y * y - 4.0) / 16.0;
      const double dpx = 4.0 * x * (x * x - 4.0) / 16.0;
      const double dpy = 4.0 * y * (y * y - 4.0) / 16.0;
      s3.dofs(d.dm.plate_dof(n, 2)) = px * py;
      s3.dofs(d.dm.plate_dof(n, 3)) = dpx * py;
      s3.dofs(d.dm.plate_dof(n, 4)) = px * dpy;
      s3.dofs(d.dm.plate_dof(n, 5)) = dpx * dpy;
    }
  const PlatePointEval peek = eval_plate_state(d.plate, d.dm, s3.dofs, 0.0, 0.0);
  CHECK(peek.dw.norm() == 0.0);             // nodal gradient dofs are exact
  CHECK(std::abs(peek.d2w[0]) > 0.1);       // genuine curvature at the bump
  for (double sgn : {1.0, -1.0}) {
    const Vec3 wz = optimal_plate_warping(s3, m, 0.0, 0.0, sgn / std::sqrt(3.0));
    CHECK(wz(2) == doctest::Approx(0.0).epsilon(1e-12));
  }
}

TEST_CASE("optimal rod warping") {
  const Discretization d = test::default_disc();
  const MaterialParams m0 = lame_from_engineering(1.0, 0.0);
  LimitState s = test::random_state(d, 0.4, 6);
  CHECK(optimal_rod_warping(s, m0, 0.3, 0.2, 0.5).norm() == 0.0);

  // W1'' = 1, W2'' = 0, nu = 0.3 at (X1, X2) = (1, 0)
  const MaterialParams m = lame_from_engineering(1.0, 0.3);
  LimitState s2(d);
  set_W1_parabola(s2, 0.5);  // W1'' = 1
  const Vec3 w = optimal_rod_warping(s2, m, 1.0, 0.0, 0.4);
  CHECK(w(0) == doctest::Approx(0.15).epsilon(1e-12));
  CHECK(w(1) == doctest::Approx(0.0).epsilon(1e-13));
  CHECK(w(2) == 0.0);

  // components are even quadratics under (X1,X2) -> (-X1,-X2)
  LimitState s3 = test::random_state(d, 0.4, 7);
  const Vec3 a = optimal_rod_warping(s3, m, 0.4, -0.6, 0.3);
  const Vec3 b = optimal_rod_warping(s3, m, -0.4, 0.6, 0.3);
  CHECK((a - b).norm() == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("limit strain tensors") {
  const Discretization d = test::default_disc();
  const MaterialParams m = lame_from_engineering(1.0, 0.3);
  LimitState zero(d);
  CHECK(limit_strain_plate(zero, m, 0.2, 0.3, 0.4).full().norm() == 0.0);
  CHECK(limit_strain_rod(zero, m, 0.2, 0.3, 0.4).full().norm() == 0.0);

  // pure torsion: only the two shear entries survive
  LimitState st(d);
  set_Q3_linear(st, 0.8);
  const Sym3 Er = limit_strain_rod(st, m, 0.3, -0.5, 0.6);
  CHECK(Er.a13 == doctest::Approx(-0.5 * (-0.5) * 0.8).epsilon(1e-12));
  CHECK(Er.a23 == doctest::Approx(0.5 * 0.3 * 0.8).epsilon(1e-12));
  CHECK(Er.a11 == 0.0);
  CHECK(Er.a33 == 0.0);
  const Mat3 full = Er.full();
  CHECK((full - full.transpose()).norm() == 0.0);

  // pure bending: in-plane block is -X3 * Hessian
  LimitState sb(d);
  const double X3 = -0.62;
  for (int j = 0; j <= d.plate.ny; ++j)
    for (int i = 0; i <= d.plate.nx; ++i) {
      const int n = d.plate.node_id(i, j);
      const double x = d.plate.node_x(i), y = d.plate.node_y(j);
      sb.dofs(d.dm.plate_dof(n, 2)) = 0.5 * x * x + 0.25 * y * y + 0.1 * x * y;
      sb.dofs(d.dm.plate_dof(n, 3)) = x + 0.1 * y;
      sb.dofs(d.dm.plate_dof(n, 4)) = 0.5 * y + 0.1 * x;
      sb.dofs(d.dm.plate_dof(n, 5)) = 0.1;
    }
  // remove the membrane part induced by the quadratic deflection
  const MembraneStrain z = membrane_strain(sb, 0.4, 0.7);
  const Sym3 Ep = limit_strain_plate(sb, m, 0.4, 0.7, X3);
  CHECK(Ep.a11 - z.Z11 == doctest::Approx(-X3 * 1.0).epsilon(1e-11));
  CHECK(Ep.a12 - z.Z12 == doctest::Approx(-X3 * 0.1).epsilon(1e-11));
  CHECK(Ep.a22 - z.Z22 == doctest::Approx(-X3 * 0.5).epsilon(1e-11));
  CHECK(Ep.a13 == 0.0);
  CHECK(Ep.a23 == 0.0);
}

TEST_CASE("energy reduction identities at the optimal warpings") {
  const Discretization d = test::default_disc(4, 4, 4);
  const MaterialParams m = lame_from_engineering(1.9, 0.32);
  const ThinQuadrature q = thin_quadrature(d.plate, d.rod, 0.0, 4);
  for (unsigned seed : {1u, 2u, 3u}) {
    const LimitState s = test::random_state(d, 0.3, seed);
    const double jp = plate_energy(s, m);
    const double jp_strain = plate_energy_from_strain(s, m, q);
    CHECK(jp_strain == doctest::Approx(jp).epsilon(1e-10));
    const double jr = rod_energy(s, m);
    const double jr_strain = rod_energy_from_strain(s, m, q);
    CHECK(jr_strain == doctest::Approx(jr).epsilon(1e-10));
  }
}

TEST_CASE("plate energy is positive on nonzero pure-bending states") {
  const Discretization d = test::default_disc();
  const MaterialParams m = lame_from_engineering(1.0, 0.3);
  for (unsigned seed : {100u, 101u, 102u, 103u}) {
    LimitState s = test::random_state(d, 0.5, seed);
    for (int n = 0; n < d.dm.n_plate_nodes; ++n) {
      s.dofs(d.dm.plate_dof(n, 0)) = 0.0;
      s.dofs(d.dm.plate_dof(n, 1)) = 0.0;
    }
    if (s.dofs.lpNorm<Eigen::Infinity>() == 0.0) continue;
    CHECK(plate_energy(s, m) > 0.0);
  }
}
