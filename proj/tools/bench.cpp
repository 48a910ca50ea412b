#include <chrono>
#include <iostream>
#include <random>

#include "plarod/limit_model.hpp"
#include "plarod/parallel.hpp"
#include "plarod/recovery.hpp"

using namespace plarod;

namespace {

double wall(const std::function<void()>& fn) {
  double best = 1e300;
  for (int rep = 0; rep < 3; ++rep) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    best = std::min(
        best,
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count());
  }
  return best;
}

}  // namespace

// Compares the serial reference path (threads = 1) against the OpenMP path
// and checks that the chunked reduction is bitwise identical.
int main() {
  const Discretization disc =
      make_discretization(PlateDomain{}, RodDomain{}, 16, 16, 16);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> dist(-0.02, 0.02);
  LimitState s(disc);
  for (int i : disc.dm.free_list) s.dofs(i) = dist(rng);
  // keep the recovery deformation orientation-preserving: modest rod bending
  // on top of small random in-plane noise
  for (int k = 0; k < disc.dm.n_rod_nodes; ++k) {
    const double x = disc.rod.node_x(k);
    s.dofs(disc.dm.rod_dof(k, 0)) = 0.05 * x * x;
    s.dofs(disc.dm.rod_dof(k, 1)) = 0.1 * x;
    s.dofs(disc.dm.rod_dof(k, 2)) = 0.0;
    s.dofs(disc.dm.rod_dof(k, 3)) = 0.0;
  }
  for (int nplate = 0; nplate < disc.dm.n_plate_nodes; ++nplate) {
    s.dofs(disc.dm.plate_dof(nplate, 2)) *= 0.2;  // gentle deflection dofs
    s.dofs(disc.dm.plate_dof(nplate, 5)) = 0.0;
  }

  ForceData fd;
  fd.f_p[2] = ScalarField::from_expression("-0.01");
  fd.f_r[0] = ScalarField::from_expression("0.005");
  fd.rod_length = disc.rod.length;
  const MaterialParams m = lame_from_engineering(1.0, 0.3);

  const int hw = max_threads();
  std::cout << "hardware threads: " << hw << "\n";

  AssemblyOptions a1;
  a1.gradient = a1.hessian = true;
  a1.threads = 1;
  AssemblyOptions ap = a1;
  ap.threads = hw;

  AssemblyResult r1, rp;
  const double t_serial =
      wall([&] { r1 = assemble(disc.plate, disc.rod, disc.dm, s.dofs, &fd, m, a1); });
  const double t_par =
      wall([&] { rp = assemble(disc.plate, disc.rod, disc.dm, s.dofs, &fd, m, ap); });
  std::cout << "assemble            serial " << t_serial << "s   omp " << t_par
            << "s   speedup " << t_serial / t_par << "\n";
  std::cout << "  bitwise identical energy: "
            << (r1.energy == rp.energy ? "yes" : "NO") << "  grad: "
            << ((r1.grad - rp.grad).lpNorm<Eigen::Infinity>() == 0.0 ? "yes" : "NO")
            << "\n";

  const SmoothedLimitState ss = smooth_state(s, 4, m, &fd);
  const RecoveryField rf = build_recovery(ss, 0.1, m);
  const ThinQuadrature q = thin_quadrature(disc.plate, disc.rod, 0.1, 6);
  RescaledEnergy e1, ep;
  const double t_re1 = wall([&] { e1 = rescaled_energy(rf, fd, m, q, 1); });
  const double t_rep = wall([&] { ep = rescaled_energy(rf, fd, m, q, hw); });
  std::cout << "rescaled_energy     serial " << t_re1 << "s   omp " << t_rep
            << "s   speedup " << t_re1 / t_rep << "\n";
  std::cout << "  physical: " << (e1.physical ? "yes" : "NO")
            << "  bitwise identical total: "
            << (e1.total == ep.total ? "yes" : "NO") << "\n";
  return 0;
}
