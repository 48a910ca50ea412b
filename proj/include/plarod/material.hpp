#pragma once

#include <Eigen/Dense>
#include <optional>

namespace plarod {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Isotropic material; both parameter pairs are kept consistent.
struct MaterialParams {
  double lambda = 0.0;
  double mu = 0.0;
  double young = 0.0;
  double poisson = 0.0;
};

MaterialParams lame_from_engineering(double young, double poisson);
MaterialParams material_from_lame(double lambda, double mu);
bool material_consistent(const MaterialParams& m, double rtol = 1e-12);

// Symmetric 3x3 strain, symmetric by storage.
struct Sym3 {
  double a11 = 0, a12 = 0, a13 = 0, a22 = 0, a23 = 0, a33 = 0;

  Mat3 full() const {
    Mat3 m;
    m << a11, a12, a13, a12, a22, a23, a13, a23, a33;
    return m;
  }
  double trace() const { return a11 + a22 + a33; }
  // tr(E^2) for symmetric E
  double trace_sq() const {
    return a11 * a11 + a22 * a22 + a33 * a33 +
           2.0 * (a12 * a12 + a13 * a13 + a23 * a23);
  }
  Sym3 scaled(double s) const {
    return {s * a11, s * a12, s * a13, s * a22, s * a23, s * a33};
  }
  static Sym3 from_matrix(const Mat3& m) {
    return {m(0, 0), 0.5 * (m(0, 1) + m(1, 0)), 0.5 * (m(0, 2) + m(2, 0)),
            m(1, 1), 0.5 * (m(1, 2) + m(2, 1)), m(2, 2)};
  }
};

/// (lambda/8) tr(E)^2 + (mu/4) tr(E^2)
double quadratic_form_Q(const Sym3& E, const MaterialParams& m);

/// St Venant-Kirchhoff density Q(F^T F - I); nullopt marks det(F) <= 0
/// (the nonphysical branch callers must propagate).
std::optional<double> svk_density(const Mat3& F, const MaterialParams& m);

/// Frobenius distance from F to SO(3) via singular values.
double dist_SO3(const Mat3& F);

}  // namespace plarod
