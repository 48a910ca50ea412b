#pragma once

#include <Eigen/Geometry>
#include <functional>

#include "plarod/limit_model.hpp"

namespace plarod {

// Quintic C^2 transition: 0 on s <= 1, 1 on s >= 2.
double plateau_blend(double s);
double plateau_blend_d1(double s);
double plateau_blend_d2(double s);
double plateau_blend_d3(double s);

/// A limit state post-processed with plateau parameter n: in-plane plate
/// gradients and deflection curvatures vanish exactly on D(O,1/n); rod fields
/// vanish on [0,1/n]; the blend zone is the annulus/segment up to 2/n.
struct SmoothedLimitState {
  const LimitState* base = nullptr;
  int n = 0;
  double rho = 0.0;  // 1/n
  double u1_O = 0, u2_O = 0, u3_O = 0;
  Vec2 grad_u3_O = Vec2::Zero();
  double energy_change = 0.0;  // |J(smoothed) - J(original)|

  struct PlateEval {
    double u1 = 0, u2 = 0;
    Vec2 du1 = Vec2::Zero(), du2 = Vec2::Zero();
    double w = 0;
    Vec2 dw = Vec2::Zero();
    std::array<double, 3> d2w{};  // xx, xy, yy
  };
  struct RodEval {
    double W1 = 0, dW1 = 0, d2W1 = 0, d3W1 = 0;
    double W2 = 0, dW2 = 0, d2W2 = 0, d3W2 = 0;
    double Q3 = 0, dQ3 = 0;
  };

  PlateEval plate(double x1, double x2) const;
  RodEval rod(double x3) const;
  double recovered_W3(double x3) const;  // constraint ODE on the smoothed state
};

SmoothedLimitState smooth_state(const LimitState& s, int n,
                                const MaterialParams& m,
                                const ForceData* fd = nullptr);

/// Limit energies of the smoothed (non-polynomial) fields by oversampled
/// quadrature.
double smoothed_plate_energy(const SmoothedLimitState& ss, const MaterialParams& m);
double smoothed_rod_energy(const SmoothedLimitState& ss, const MaterialParams& m);
double smoothed_load(const SmoothedLimitState& ss, const ForceData& fd);
double smoothed_total_energy(const SmoothedLimitState& ss, const ForceData& fd,
                             const MaterialParams& m);

/// SO(3)-valued solution of dR/dx3 = A_F R, R(0) = I, by per-step exponentials
/// of the midpoint generator with quaternion renormalization. Exact for a
/// constant generator.
struct RotationField {
  double delta = 0, rho = 0, length = 0;
  Vec3 tilt = Vec3::Zero();  // junction tilt axis vector
  double h = 0;
  std::vector<Eigen::Quaterniond> steps;  // at rho + k*h
  std::vector<Vec3> wint_steps;           // int_0^{x3} (R - I) e3 at grid nodes
  std::vector<Vec3> gen_steps;            // midpoint generator, frozen per step
  const SmoothedLimitState* ss = nullptr;

  Mat3 R(double x3) const;
  /// The per-step frozen generator: dR/dx3 = A_gen R holds exactly for the
  /// stored field, so analytic recovery gradients match finite differences.
  Vec3 frozen_generator(double x3) const;
  Vec3 Wint(double x3) const;       // int_0^{x3} (R(t) - I) e3 dt
  Mat3 Rbar(double x3) const;       // exp(delta * A_tilt * x3)
  Vec3 Wbar_int(double x3) const;   // closed-form integral of (Rbar - I) e3
  double max_orthogonality_defect(int samples = 200) const;
};

RotationField integrate_rotation(const SmoothedLimitState& ss, double delta,
                                 int steps_per_unit = 2000);

/// Generic stepper for unit tests: advances R through [x0, x1].
Mat3 step_rotation_ode(const std::function<Vec3(double)>& gen, double x0,
                       double x1, int steps);

Mat3 rodrigues(const Vec3& axis);  // exp of the antisymmetric map of axis

/// The 3D recovery deformation over S_delta: plate formula on Omega_delta
/// (covering the junction cylinder) and rod formula on B_delta.
struct RecoveryField {
  const SmoothedLimitState* ss = nullptr;
  MaterialParams m;
  double delta = 0;
  double rho = 0;
  RotationField rot;
  double edge_width = 0.4;  // plate warping dies within this band at the rim

  Vec3 eval_plate(const Vec3& x) const;  // x3 physical in [-delta, delta]
  Mat3 grad_plate(const Vec3& x) const;
  Vec3 eval_rod(const Vec3& x) const;  // x3 in [-delta, L]
  Mat3 grad_rod(const Vec3& x) const;
};

RecoveryField build_recovery(const SmoothedLimitState& ss, double delta,
                             const MaterialParams& m, double edge_width = 0.4);

struct RescaledEnergy {
  double elastic = 0;  // [int_{Omega_d} W + int_{B_d \ C_d} W] / d^5
  double load = 0;     // int f_d . (v - Id) / d^5
  double total = 0;
  bool physical = true;  // det grad v > 0 at every quadrature point
  long bad_points = 0;
};

RescaledEnergy rescaled_energy(const RecoveryField& rf, const ForceData& fd,
                               const MaterialParams& m,
                               const ThinQuadrature& q, int threads = 1);

struct SweepRow {
  double delta = 0;
  int n = 0;
  double elastic = 0, load = 0, total = 0;
  double limit_energy = 0;
  double gap = 0;
  bool physical = true;
  // diagnostic seminorm ratios of the recovery displacement
  double gs_ratio = 0;    // G_s(v - Id, Omega_delta) / delta^{5/2}
  double dist_ratio = 0;  // d(v, B_delta \ C_delta) / delta^{5/2}
};

std::vector<SweepRow> delta_sweep(const LimitState& s, const ForceData& fd,
                                  const MaterialParams& m,
                                  const std::vector<double>& deltas, int n,
                                  int quad_order = 4, int threads = 1,
                                  double edge_width = 0.4);

}  // namespace plarod
