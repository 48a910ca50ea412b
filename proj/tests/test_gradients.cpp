#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "plarod/limit_model.hpp"
#include "support.hpp"

using namespace plarod;

namespace {

ForceData rich_forces() {
  ForceData fd;
  fd.rod_length = 1.0;
  fd.f_p[0] = ScalarField::from_expression("0.2*x2");
  fd.f_p[1] = ScalarField::from_expression("-0.1");
  fd.f_p[2] = ScalarField::from_expression("0.3*cos(x1)");
  fd.f_r[0] = ScalarField::from_expression("0.15");
  fd.f_r[1] = ScalarField::from_expression("-0.2*x3");
  fd.f_r[2] = ScalarField::from_expression("0.4 - 0.3*x3");
  fd.g1[1] = ScalarField::from_expression("0.12");
  fd.g1[2] = ScalarField::from_expression("-0.07*x3");
  fd.g2[0] = ScalarField::from_expression("0.05");
  fd.g2[2] = ScalarField::from_expression("0.3");
  return fd;
}

}  // namespace

TEST_CASE("gradient vanishes at the origin without forces") {
  const Discretization d = test::default_disc();
  const MaterialParams m = lame_from_engineering(1.0, 0.3);
  LimitState zero(d);
  const Eigen::VectorXd g = gradient(zero, test::zero_forces(), m);
  CHECK(g.lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("gradient at zero equals minus the load gradient") {
  const Discretization d = test::default_disc();
  const MaterialParams m = lame_from_engineering(1.0, 0.3);
  ForceData fd = rich_forces();
  LimitState zero(d);
  const Eigen::VectorXd g = gradient(zero, fd, m);
  const Eigen::VectorXd g_fd = test::fd_gradient(
      d,
      [&](const Eigen::VectorXd& x) {
        LimitState s(d);
        s.dofs = x;
        return -load_functional(s, fd);
      },
      zero.dofs, 1e-6);
  CHECK((g - g_fd).lpNorm<Eigen::Infinity>() <
        1e-9 * std::max(1.0, g_fd.lpNorm<Eigen::Infinity>()));
}

TEST_CASE("analytic gradient matches central differences on random states") {
  const Discretization d = test::default_disc(4, 4, 4);
  const MaterialParams m = lame_from_engineering(1.0, 0.3);
  const ForceData fd = rich_forces();
  for (unsigned seed : {10u, 20u}) {
    const LimitState s = test::random_state(d, 0.3, seed);
    const Eigen::VectorXd g = gradient(s, fd, m);
    const Eigen::VectorXd g_fd = test::fd_gradient(
        d,
        [&](const Eigen::VectorXd& x) {
          LimitState t(d);
          t.dofs = x;
          return total_energy(t, fd, m);
        },
        s.dofs, 1e-6);
    const double scale = g_fd.lpNorm<Eigen::Infinity>();
    CHECK((g - g_fd).lpNorm<Eigen::Infinity>() < 1e-6 * scale);
  }
}

TEST_CASE("hessian columns match finite differences of the gradient") {
  const Discretization d = test::default_disc(2, 2, 2);
  const MaterialParams m = lame_from_engineering(1.0, 0.3);
  const ForceData fd = rich_forces();
  const LimitState s = test::random_state(d, 0.3, 77);

  AssemblyOptions o;
  o.gradient = true;
  o.hessian = true;
  const AssemblyResult r = assemble(d.plate, d.rod, d.dm, s.dofs, &fd, m, o);
  const Eigen::MatrixXd H(r.hess.m);

  const double h = 1e-6;
  double worst = 0.0, scale = H.cwiseAbs().maxCoeff();
  for (int k = 0; k < d.dm.n_free(); ++k) {
    Eigen::VectorXd xp = s.dofs, xm = s.dofs;
    xp(d.dm.free_list[static_cast<std::size_t>(k)]) += h;
    xm(d.dm.free_list[static_cast<std::size_t>(k)]) -= h;
    AssemblyOptions og;
    og.gradient = true;
    const Eigen::VectorXd gp = assemble(d.plate, d.rod, d.dm, xp, &fd, m, og).grad;
    const Eigen::VectorXd gm = assemble(d.plate, d.rod, d.dm, xm, &fd, m, og).grad;
    const Eigen::VectorXd col = (gp - gm) / (2 * h);
    worst = std::max(worst, (H.col(k) - col).lpNorm<Eigen::Infinity>());
  }
  CHECK(worst < 1e-5 * scale);
}

TEST_CASE("energy assembled with and without load decomposes exactly") {
  const Discretization d = test::default_disc();
  const MaterialParams m = lame_from_engineering(1.0, 0.25);
  const ForceData fd = rich_forces();
  const LimitState s = test::random_state(d, 0.25, 4);
  const double total = total_energy(s, fd, m);
  const double elastic = plate_energy(s, m) + rod_energy(s, m);
  const double load = load_functional(s, fd);
  CHECK(std::abs(total - (elastic - load)) <=
        1e-13 * std::max(1.0, std::abs(total)));
}
