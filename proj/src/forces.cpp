#include "plarod/forces.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "plarod/quadrature.hpp"

namespace plarod {

ScalarField ScalarField::from_table(std::vector<double> x, std::vector<double> v) {
  if (x.size() != v.size() || x.size() < 2)
    throw std::invalid_argument("force table: need matching columns, >= 2 rows");
  for (std::size_t i = 1; i < x.size(); ++i)
    if (!(x[i] > x[i - 1]))
      throw std::invalid_argument("force table: abscissae must increase strictly");
  ScalarField f;
  f.tabulated = true;
  f.table_x = std::move(x);
  f.table_v = std::move(v);
  return f;
}

double ScalarField::eval(double x1, double x2, double x3) const {
  if (!tabulated) return expr.eval(x1, x2, x3);
  const auto& xs = table_x;
  if (x3 <= xs.front()) return table_v.front();
  if (x3 >= xs.back()) return table_v.back();
  const auto it = std::upper_bound(xs.begin(), xs.end(), x3);
  const std::size_t k = static_cast<std::size_t>(it - xs.begin());
  const double t = (x3 - xs[k - 1]) / (xs[k] - xs[k - 1]);
  return (1.0 - t) * table_v[k - 1] + t * table_v[k];
}

Vec3 ForceData::f_p_at(double x1, double x2) const {
  return scale * Vec3{f_p[0].eval(x1, x2, 0), f_p[1].eval(x1, x2, 0),
                      f_p[2].eval(x1, x2, 0)};
}
Vec3 ForceData::f_r_at(double x3) const {
  return scale * Vec3{f_r[0].eval(0, 0, x3), f_r[1].eval(0, 0, x3),
                      f_r[2].eval(0, 0, x3)};
}
Vec3 ForceData::g1_at(double x3) const {
  return scale * Vec3{g1[0].eval(0, 0, x3), g1[1].eval(0, 0, x3),
                      g1[2].eval(0, 0, x3)};
}
Vec3 ForceData::g2_at(double x3) const {
  return scale * Vec3{g2[0].eval(0, 0, x3), g2[1].eval(0, 0, x3),
                      g2[2].eval(0, 0, x3)};
}

bool ForceData::all_zero() const {
  for (int i = 0; i < 3; ++i)
    if (!f_p[i].is_zero() || !f_r[i].is_zero() || !g1[i].is_zero() ||
        !g2[i].is_zero())
      return false;
  return true;
}

Vec3 eval_f_delta(const ForceData& fd, const Vec3& x, double delta,
                  ForceRegion region) {
  if (!(delta > 0.0)) throw std::invalid_argument("eval_f_delta: delta > 0");
  if (region == ForceRegion::Plate) {
    const Vec3 fp = fd.f_p_at(x(0), x(1));
    const double d2 = delta * delta;
    return {d2 * fp(0), d2 * fp(1), d2 * delta * fp(2)};
  }
  if (!(x(2) > delta))
    throw std::invalid_argument("eval_f_delta: rod forces are defined for x3 > delta");
  const Vec3 fr = fd.f_r_at(x(2));
  const Vec3 G1 = fd.g1_at(x(2));
  const Vec3 G2 = fd.g2_at(x(2));
  const double d52 = std::pow(delta, 2.5);
  Vec3 v = Vec3::Zero();
  v(0) += fr(0);
  v(1) += fr(1);
  v(2) += fr(2) / std::sqrt(delta);
  v += (x(0) / (delta * delta)) * G1 + (x(1) / (delta * delta)) * G2;
  return d52 * v;
}

double antiderivative_Fr3(const ForceData& fd, double x3) {
  const double L = fd.rod_length;
  if (x3 < -1e-12 || x3 > L + 1e-12)
    throw std::invalid_argument("antiderivative_Fr3: x3 outside [0, L]");
  x3 = std::clamp(x3, 0.0, L);
  if (x3 == L) return 0.0;
  if (fd.f_r[2].is_zero()) return 0.0;
  const int nsub = std::max(1, static_cast<int>(std::ceil((L - x3) / (L / 256.0))));
  return integrate_composite(
      [&](double s) { return fd.fr3_at(s); }, x3, L, nsub, 8);
}

AdmissibilityThresholds default_thresholds(const MaterialParams& m, double L) {
  return {0.1 * m.mu, 0.1 * m.mu / L};
}

AdmissibilityReport check_admissibility(const ForceData& fd,
                                        const PlateMesh& plate,
                                        const RodMesh& rod,
                                        const AdmissibilityThresholds& thr) {
  if (!(thr.threshold_p > 0.0 && thr.threshold_r > 0.0))
    throw std::invalid_argument("admissibility thresholds must be positive");
  AdmissibilityReport rep;
  rep.threshold_p = thr.threshold_p;
  rep.threshold_r = thr.threshold_r;

  // ||f_p||_{L2(omega)} over the plate rule
  const GaussRule base = gauss_legendre(plate.gauss_order);
  double fp2 = 0.0;
  for (int e = 0; e < plate.n_elems(); ++e) {
    int ex, ey;
    plate.elem_cell(e, ex, ey);
    const GaussRule gx = mapped_rule(base, plate.node_x(ex), plate.node_x(ex + 1));
    const GaussRule gy = mapped_rule(base, plate.node_y(ey), plate.node_y(ey + 1));
    for (std::size_t a = 0; a < gx.nodes.size(); ++a)
      for (std::size_t b = 0; b < gy.nodes.size(); ++b) {
        const Vec3 f = fd.f_p_at(gx.nodes[a], gy.nodes[b]);
        fp2 += gx.weights[a] * gy.weights[b] * f.squaredNorm();
      }
  }
  rep.fp_norm = std::sqrt(fp2);

  // ||f_{r,3}||_{L2(0,L)} and the sign of F_{r,3} on the rod rule
  const GaussRule rbase = gauss_legendre(std::max(4, rod.gauss_order));
  double fr2 = 0.0;
  double minF = std::numeric_limits<double>::infinity();
  bool case1 = true;
  for (int e = 0; e < rod.n_elems; ++e) {
    const GaussRule g = mapped_rule(rbase, rod.node_x(e), rod.node_x(e + 1));
    for (std::size_t c = 0; c < g.nodes.size(); ++c) {
      const double f3 = fd.fr3_at(g.nodes[c]);
      fr2 += g.weights[c] * f3 * f3;
      const double F = antiderivative_Fr3(fd, g.nodes[c]);
      minF = std::min(minF, F);
      if (F < -1e-12) case1 = false;
    }
  }
  rep.fr3_norm = std::sqrt(fr2);
  rep.min_Fr3 = minF;
  rep.case1_holds = case1;

  if (!std::isfinite(rep.fp_norm) || !std::isfinite(rep.fr3_norm)) {
    rep.verdict = AdmissibilityReport::Verdict::Indeterminate;
  } else if (rep.fp_norm <= thr.threshold_p &&
             (rep.case1_holds || rep.fr3_norm <= thr.threshold_r)) {
    rep.verdict = AdmissibilityReport::Verdict::Admissible;
  } else {
    rep.verdict = AdmissibilityReport::Verdict::Inadmissible;
  }
  return rep;
}

const char* verdict_name(AdmissibilityReport::Verdict v) {
  switch (v) {
    case AdmissibilityReport::Verdict::Admissible: return "admissible";
    case AdmissibilityReport::Verdict::Inadmissible: return "inadmissible";
    case AdmissibilityReport::Verdict::Indeterminate: return "indeterminate";
  }
  return "indeterminate";
}

}  // namespace plarod
