#pragma once

#include "plarod/fem.hpp"

namespace plarod {

/// Meshes + DOF numbering for one problem instance.
struct Discretization {
  PlateMesh plate;
  RodMesh rod;
  DofMap dm;
};

Discretization make_discretization(const PlateDomain& pd, const RodDomain& rd,
                                   int nx, int ny, int rod_elems,
                                   int plate_gauss = 4, int rod_gauss = 3);

/// Discretized element of the limit admissible set: (U1, U2, U3, W1, W2, Q3)
/// nodal DOFs; W3 is slaved to the stretching-bending constraint and is
/// recovered, never stored.
struct LimitState {
  const Discretization* disc = nullptr;
  Eigen::VectorXd dofs;

  explicit LimitState(const Discretization& d)
      : disc(&d), dofs(Eigen::VectorXd::Zero(d.dm.total)) {}
  double u3_at_origin() const { return dofs(disc->dm.u3_origin); }
};

struct MembraneStrain {
  double Z11 = 0, Z12 = 0, Z22 = 0;
  double trace() const { return Z11 + Z22; }
};

MembraneStrain membrane_strain(const LimitState& s, double x1, double x2);

/// W3(x3) = U3(0,0) - 1/2 int_0^{x3} (|W1'|^2 + |W2'|^2); exact elementwise
/// Gauss integration of the piecewise-quartic integrand.
double recover_W3(const LimitState& s, double x3);

double plate_energy(const LimitState& s, const MaterialParams& m);
double rod_energy(const LimitState& s, const MaterialParams& m);
double load_functional(const LimitState& s, const ForceData& fd);
double total_energy(const LimitState& s, const ForceData& fd,
                    const MaterialParams& m);
/// Slow reference path for the load: quadrature against the recovered W3
/// instead of the antiderivative form (test oracle).
double load_functional_quadrature(const LimitState& s, const ForceData& fd,
                                  int oversample = 4);

Eigen::VectorXd gradient(const LimitState& s, const ForceData& fd,
                         const MaterialParams& m);

Vec3 optimal_plate_warping(const LimitState& s, const MaterialParams& m,
                           double x1, double x2, double X3);
Vec3 optimal_rod_warping(const LimitState& s, const MaterialParams& m,
                         double X1, double X2, double x3);

Sym3 limit_strain_plate(const LimitState& s, const MaterialParams& m,
                        double x1, double x2, double X3);
Sym3 limit_strain_rod(const LimitState& s, const MaterialParams& m, double X1,
                      double X2, double x3);

/// Quadrature of Q(2 E) over the rescaled domains; with the optimal warpings
/// these reproduce plate_energy resp. rod_energy (pass a junction-free
/// quadrature, delta = 0).
double plate_energy_from_strain(const LimitState& s, const MaterialParams& m,
                                const ThinQuadrature& q);
double rod_energy_from_strain(const LimitState& s, const MaterialParams& m,
                              const ThinQuadrature& q);

}  // namespace plarod
