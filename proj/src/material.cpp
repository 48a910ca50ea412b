#include "plarod/material.hpp"

#include <cmath>
#include <stdexcept>

namespace plarod {

MaterialParams lame_from_engineering(double young, double poisson) {
  if (!(young > 0.0))
    throw std::invalid_argument("material: Young modulus must be positive");
  if (!(poisson > -1.0 && poisson < 0.5))
    throw std::invalid_argument("material: Poisson ratio must lie in (-1, 1/2)");
  MaterialParams m;
  m.young = young;
  m.poisson = poisson;
  m.mu = young / (2.0 * (1.0 + poisson));
  m.lambda = young * poisson / ((1.0 + poisson) * (1.0 - 2.0 * poisson));
  if (m.lambda < 0.0)
    throw std::invalid_argument("material: negative Lame lambda not supported");
  return m;
}

MaterialParams material_from_lame(double lambda, double mu) {
  if (!(mu > 0.0)) throw std::invalid_argument("material: mu must be positive");
  if (lambda < 0.0)
    throw std::invalid_argument("material: lambda must be nonnegative");
  MaterialParams m;
  m.lambda = lambda;
  m.mu = mu;
  m.young = mu * (3.0 * lambda + 2.0 * mu) / (lambda + mu);
  m.poisson = lambda / (2.0 * (lambda + mu));
  return m;
}

bool material_consistent(const MaterialParams& m, double rtol) {
  const double e = m.mu * (3.0 * m.lambda + 2.0 * m.mu) / (m.lambda + m.mu);
  const double nu = m.lambda / (2.0 * (m.lambda + m.mu));
  const bool young_ok = std::abs(e - m.young) <= rtol * std::max(1.0, std::abs(m.young));
  const bool nu_ok = std::abs(nu - m.poisson) <= rtol * std::max(1.0, std::abs(m.poisson));
  return young_ok && nu_ok && m.mu > 0.0 && m.lambda >= 0.0 &&
         m.poisson > -1.0 && m.poisson < 0.5 && m.young > 0.0;
}

double quadratic_form_Q(const Sym3& E, const MaterialParams& m) {
  const double tr = E.trace();
  return m.lambda / 8.0 * tr * tr + m.mu / 4.0 * E.trace_sq();
}

std::optional<double> svk_density(const Mat3& F, const MaterialParams& m) {
  if (F.determinant() <= 0.0) return std::nullopt;
  const Mat3 C = F.transpose() * F - Mat3::Identity();
  return quadratic_form_Q(Sym3::from_matrix(C), m);
}

double dist_SO3(const Mat3& F) {
  Eigen::JacobiSVD<Mat3> svd(F);
  Vec3 s = svd.singularValues();
  // Polar convention: an orientation-reversing F flips the smallest factor.
  if (F.determinant() <= 0.0) s(2) = -s(2);
  const double d0 = s(0) - 1.0, d1 = s(1) - 1.0, d2 = s(2) - 1.0;
  return std::sqrt(d0 * d0 + d1 * d1 + d2 * d2);
}

}  // namespace plarod
