#pragma once

#include <Eigen/Sparse>
#include <array>
#include <vector>

#include "plarod/forces.hpp"
#include "plarod/geometry.hpp"
#include "plarod/material.hpp"

namespace plarod {

// Plate-model coefficients derived from the material. The rod section is the
// unit disc: bending rigidity E*I with I = pi/4, torsional rigidity mu*J with
// J = pi/2, so the limit line densities are (E*pi/8)|W''|^2 and
// (mu*pi/4)|Q3'|^2. The distributed-moment pairing carries the cross-section
// second moment int_D X_a X_b = (pi/4) delta_ab.
inline double plate_bending_coef(const MaterialParams& m) {
  return m.young / (3.0 * (1.0 - m.poisson * m.poisson));
}
inline double plate_membrane_coef(const MaterialParams& m) {
  return m.young / (1.0 - m.poisson * m.poisson);
}
inline double rod_bending_coef(const MaterialParams& m) {
  return m.young * M_PI / 8.0;
}
inline double rod_torsion_coef(const MaterialParams& m) {
  return m.mu * M_PI / 4.0;
}
inline double moment_load_coef() { return M_PI / 4.0; }

// Global DOF layout: plate node n owns [u1, u2, w, w_x, w_y, w_xy] at
// 6n + 0..5; rod node k owns [W1, W1', W2, W2', Q3] at 6*Np + 5k + 0..4.
struct DofMap {
  int n_plate_nodes = 0;
  int n_rod_nodes = 0;
  int total = 0;
  std::vector<uint8_t> constrained;  // per-dof flag, value pinned to zero
  std::vector<int> free_index;       // -1 for constrained dofs
  std::vector<int> free_list;
  int u3_origin = -1;  // deflection value DOF at the junction node

  int plate_dof(int node, int which) const { return 6 * node + which; }
  int rod_dof(int node, int which) const {
    return 6 * n_plate_nodes + 5 * node + which;
  }
  int n_free() const { return static_cast<int>(free_list.size()); }

  Eigen::VectorXd reduce(const Eigen::VectorXd& full) const;
  Eigen::VectorXd expand(const Eigen::VectorXd& free) const;
};

DofMap build_dof_map(const PlateMesh& plate, const RodMesh& rod);

// --------------------------------------------------------------------------
// Shape functions (all plate elements are congruent rectangles)
// --------------------------------------------------------------------------

struct PlateShape {
  std::array<double, 4> N{}, Nx{}, Ny{};                    // bilinear
  std::array<double, 16> B{}, Bx{}, By{}, Bxx{}, Bxy{}, Byy{};  // BFS bicubic
  std::array<double, 16> Bxxx{}, Bxxy{}, Bxyy{}, Byyy{};
};

/// xi, eta in [0,1]; derivatives are physical (scaled by element size).
PlateShape plate_shape(double hx, double hy, double xi, double eta,
                       bool with_thirds = false);

struct RodShape {
  std::array<double, 4> Hv{}, Hd{}, Hdd{}, Hddd{};  // Hermite cubic
  std::array<double, 2> Lv{}, Ld{};                 // linear
};

RodShape rod_shape(double h, double t);

// --------------------------------------------------------------------------
// Pointwise interpolation of a state vector
// --------------------------------------------------------------------------

struct PlatePointEval {
  double u1 = 0, u2 = 0;
  Vec2 du1 = Vec2::Zero(), du2 = Vec2::Zero();
  std::array<double, 3> d2u1{}, d2u2{};  // xx, xy, yy
  double w = 0;
  Vec2 dw = Vec2::Zero();
  std::array<double, 3> d2w{};   // xx, xy, yy
  std::array<double, 4> d3w{};   // xxx, xxy, xyy, yyy
};

struct RodPointEval {
  double W1 = 0, dW1 = 0, d2W1 = 0, d3W1 = 0;
  double W2 = 0, dW2 = 0, d2W2 = 0, d3W2 = 0;
  double Q3 = 0, dQ3 = 0;
};

PlatePointEval eval_plate_state(const PlateMesh& mesh, const DofMap& dm,
                                const Eigen::VectorXd& x, double x1, double x2,
                                bool with_thirds = false);
RodPointEval eval_rod_state(const RodMesh& mesh, const DofMap& dm,
                            const Eigen::VectorXd& x, double x3);

// --------------------------------------------------------------------------
// Assembly of the discrete total energy, its gradient and Hessian
// --------------------------------------------------------------------------

struct SparseSymmetric {
  Eigen::SparseMatrix<double, Eigen::RowMajor> m;

  int dim() const { return static_cast<int>(m.rows()); }
  double symmetry_error() const;
};

struct AssemblyOptions {
  bool gradient = false;
  bool hessian = false;
  bool elastic = true;
  bool load = true;
  bool plate_part = true;
  bool rod_part = true;
  int threads = 1;
};

struct AssemblyResult {
  double energy = 0.0;
  Eigen::VectorXd grad;  // on free dofs
  SparseSymmetric hess;  // on free dofs
};

/// fd may be null when opts.load is false.
AssemblyResult assemble(const PlateMesh& plate, const RodMesh& rod,
                        const DofMap& dm, const Eigen::VectorXd& x,
                        const ForceData* fd, const MaterialParams& m,
                        const AssemblyOptions& opts);

}  // namespace plarod
