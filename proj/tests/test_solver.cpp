#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "plarod/solver.hpp"
#include "support.hpp"

using namespace plarod;

namespace {

ForceData plate_load(double c) {
  ForceData fd;
  fd.rod_length = 1.0;
  fd.f_p[2] = ScalarField::from_expression(std::to_string(c));
  return fd;
}

}  // namespace

TEST_CASE("zero forces converge immediately to the zero state") {
  const Discretization d = test::default_disc();
  const MaterialParams m = lame_from_engineering(1.0, 0.3);
  const SolveReport r = minimize(d, test::zero_forces(), m,
                                 Eigen::VectorXd::Zero(d.dm.total), SolveOptions{});
  CHECK(r.status == SolveStatus::Converged);
  CHECK(r.iterations == 0);
  CHECK(r.energy == 0.0);
  CHECK(r.state_dofs.lpNorm<Eigen::Infinity>() == 0.0);
  CHECK(r.hessian_negative_eigs == 0);
}

TEST_CASE("energy history decreases and the verdict is certified") {
  const Discretization d = test::default_disc(4, 4, 4);
  const MaterialParams m = lame_from_engineering(1.0, 0.3);
  ForceData fd = plate_load(-0.02);
  fd.f_r[0] = ScalarField::from_expression("0.01");
  const SolveReport r =
      minimize(d, fd, m, Eigen::VectorXd::Zero(d.dm.total), SolveOptions{});
  CHECK(r.status == SolveStatus::Converged);
  CHECK(r.grad_norms.back() <= 1e-10);
  for (std::size_t k = 1; k < r.energies.size(); ++k)
    CHECK(r.energies[k] <= r.energies[k - 1] + 1e-13 * (1.0 + std::abs(r.energies[k - 1])));
  CHECK(r.hessian_negative_eigs == 0);
  CHECK(r.energy < 0.0);  // the load does work
}

TEST_CASE("rod relaxes to zero when rod forces vanish") {
  const Discretization d = test::default_disc(4, 4, 4);
  const MaterialParams m = lame_from_engineering(1.0, 0.3);
  const ForceData fd = plate_load(-0.05);
  const SolveReport r =
      minimize(d, fd, m, Eigen::VectorXd::Zero(d.dm.total), SolveOptions{});
  CHECK(r.status == SolveStatus::Converged);
  double rod_norm = 0.0;
  for (int k = 0; k < d.dm.n_rod_nodes; ++k)
    for (int j = 0; j < 5; ++j)
      rod_norm = std::max(rod_norm, std::abs(r.state_dofs(d.dm.rod_dof(k, j))));
  CHECK(rod_norm < 1e-12);

  // plate-only oracle: rebuild without the rod part
  LimitState s(d);
  s.dofs = r.state_dofs;
  AssemblyOptions po;
  po.rod_part = false;
  MaterialParams mm = m;
  const double plate_only =
      assemble(d.plate, d.rod, d.dm, s.dofs, &fd, mm, po).energy;
  CHECK(r.energy == doctest::Approx(plate_only).epsilon(1e-12));
}

TEST_CASE("linear-regime scaling of the minimizer") {
  const Discretization d = test::default_disc(4, 4, 4);
  const MaterialParams m = lame_from_engineering(1.0, 0.3);
  ForceData fd = plate_load(-1.0);
  fd.f_r[1] = ScalarField::from_expression("x3");
  SolveOptions opts;
  opts.grad_tol = 1e-13;
  const double t = 1e-3;
  const SolveReport r1 =
      minimize(d, fd.scaled(t), m, Eigen::VectorXd::Zero(d.dm.total), opts);
  const SolveReport r2 =
      minimize(d, fd.scaled(t / 2), m, Eigen::VectorXd::Zero(d.dm.total), opts);
  CHECK(r1.status == SolveStatus::Converged);
  CHECK(r2.status == SolveStatus::Converged);
  const Eigen::VectorXd a = r1.state_dofs / t;
  const Eigen::VectorXd b = r2.state_dofs / (t / 2);
  CHECK((a - b).norm() / a.norm() < 1e-2);
}

TEST_CASE("continuation sweep warm-starts and matches a direct solve") {
  const Discretization d = test::default_disc(4, 4, 2);
  const MaterialParams m = lame_from_engineering(1.0, 0.3);
  const ForceData fd = plate_load(-0.03);
  SolveOptions opts;
  const auto steps = continuation_sweep(d, fd, m, {0.5, 1.0}, opts);
  REQUIRE(steps.size() == 2);
  CHECK(steps[0].report.status == SolveStatus::Converged);
  CHECK(steps[1].report.status == SolveStatus::Converged);
  CHECK(!steps[1].cold_started);

  const SolveReport direct =
      minimize(d, fd, m, Eigen::VectorXd::Zero(d.dm.total), opts);
  CHECK(steps[1].report.energy ==
        doctest::Approx(direct.energy).epsilon(1e-8));

  CHECK_THROWS_AS(continuation_sweep(d, fd, m, {1.0, 0.5}, opts),
                  std::invalid_argument);
}

TEST_CASE("single trivial continuation step") {
  const Discretization d = test::default_disc(2, 2, 2);
  const MaterialParams m = lame_from_engineering(1.0, 0.3);
  const auto steps =
      continuation_sweep(d, test::zero_forces(), m, {0.0}, SolveOptions{});
  REQUIRE(steps.size() == 1);
  CHECK(steps[0].report.status == SolveStatus::Converged);
  CHECK(steps[0].report.energy == 0.0);
}

TEST_CASE("constraint integrity at a converged solution") {
  const Discretization d = test::default_disc(4, 4, 4);
  const MaterialParams m = lame_from_engineering(1.0, 0.3);
  ForceData fd = plate_load(-0.02);
  fd.f_r[0] = ScalarField::from_expression("0.02");
  fd.f_r[2] = ScalarField::from_expression("0.01");
  const SolveReport r =
      minimize(d, fd, m, Eigen::VectorXd::Zero(d.dm.total), SolveOptions{});
  REQUIRE(r.status == SolveStatus::Converged);
  LimitState s(d);
  s.dofs = r.state_dofs;

  CHECK(recover_W3(s, 0.0) == s.u3_at_origin());  // exact anchoring

  // ODE residual at quadrature points by central differences of recover_W3
  const double h = 1e-5;
  for (int e = 0; e < d.rod.n_elems; ++e)
    for (double t : {0.2, 0.5, 0.8}) {
      const double x = d.rod.node_x(e) + t * d.rod.h;
      const double dW3 = (recover_W3(s, x + h) - recover_W3(s, x - h)) / (2 * h);
      const RodPointEval re = eval_rod_state(d.rod, d.dm, s.dofs, x);
      const double resid = dW3 + 0.5 * (re.dW1 * re.dW1 + re.dW2 * re.dW2);
      CHECK(std::abs(resid) < 1e-10);
    }
}

TEST_CASE("small plate load matches an independent linear Kirchhoff solve") {
  const Discretization d = test::default_disc(4, 4, 2);
  const MaterialParams m = lame_from_engineering(1.0, 0.3);
  const ForceData fd = plate_load(-1.0);

  // linear oracle: stiffness at the zero state against the load vector
  AssemblyOptions ho;
  ho.hessian = true;
  ho.gradient = true;
  ho.load = false;
  const AssemblyResult k0 = assemble(d.plate, d.rod, d.dm,
                                     Eigen::VectorXd::Zero(d.dm.total), nullptr,
                                     m, ho);
  AssemblyOptions lo;
  lo.gradient = true;
  lo.elastic = false;
  const Eigen::VectorXd f =
      -assemble(d.plate, d.rod, d.dm, Eigen::VectorXd::Zero(d.dm.total), &fd, m,
                lo)
           .grad;  // unit-scale load vector
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(
      Eigen::SparseMatrix<double>(k0.hess.m));
  REQUIRE(ldlt.info() == Eigen::Success);
  const Eigen::VectorXd x_lin = ldlt.solve(f);

  SolveOptions opts;
  opts.grad_tol = 1e-14;
  double prev = 1e300;
  for (double eps : {1e-3, 1e-4}) {
    const SolveReport r = minimize(d, fd.scaled(eps), m,
                                   Eigen::VectorXd::Zero(d.dm.total), opts);
    REQUIRE(r.status == SolveStatus::Converged);
    const Eigen::VectorXd ratio = d.dm.reduce(r.state_dofs) / eps;
    const double rel = (ratio - x_lin).norm() / x_lin.norm();
    CHECK(rel < 1e-2);
    CHECK(rel < prev);  // first-order agreement sharpens as eps shrinks
    prev = rel;
  }
}

TEST_CASE("iteration cap reports the last iterate instead of discarding it") {
  const Discretization d = test::default_disc(2, 2, 2);
  const MaterialParams m = lame_from_engineering(1.0, 0.3);
  const ForceData fd = plate_load(-0.05);
  SolveOptions opts;
  opts.max_iters = 1;
  const SolveReport r =
      minimize(d, fd, m, Eigen::VectorXd::Zero(d.dm.total), opts);
  CHECK(r.status == SolveStatus::MaxIterations);
  CHECK(r.state_dofs.lpNorm<Eigen::Infinity>() > 0.0);  // one step was taken
  CHECK(r.energies.size() == 2);
  CHECK(r.energies[1] < r.energies[0]);
}
