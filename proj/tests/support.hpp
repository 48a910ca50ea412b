#pragma once

#include <random>

#include "plarod/limit_model.hpp"

namespace plarod::test {

inline Discretization default_disc(int nx = 4, int ny = 4, int ne = 4) {
  return make_discretization(PlateDomain{}, RodDomain{}, nx, ny, ne);
}

inline LimitState random_state(const Discretization& disc, double scale,
                               unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-scale, scale);
  LimitState s(disc);
  for (int i : disc.dm.free_list) s.dofs(i) = dist(rng);
  return s;
}

inline Mat3 random_rotation(std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::Quaterniond q(g(rng), g(rng), g(rng), g(rng));
  q.normalize();
  return q.toRotationMatrix();
}

inline ForceData zero_forces(double L = 1.0) {
  ForceData fd;
  fd.rod_length = L;
  return fd;
}

// central finite difference of a scalar functional of the free dofs
template <class F>
Eigen::VectorXd fd_gradient(const Discretization& disc, const F& energy,
                            const Eigen::VectorXd& x_full, double h) {
  Eigen::VectorXd g(disc.dm.n_free());
  for (int k = 0; k < disc.dm.n_free(); ++k) {
    Eigen::VectorXd xp = x_full, xm = x_full;
    xp(disc.dm.free_list[static_cast<std::size_t>(k)]) += h;
    xm(disc.dm.free_list[static_cast<std::size_t>(k)]) -= h;
    g(k) = (energy(xp) - energy(xm)) / (2 * h);
  }
  return g;
}

}  // namespace plarod::test
