#pragma once

#include <string>
#include <vector>

#include "plarod/expression.hpp"
#include "plarod/geometry.hpp"
#include "plarod/material.hpp"

namespace plarod {

/// One scalar force component: a closed-form expression or a sampled table
/// with linear interpolation in the axial coordinate.
struct ScalarField {
  Expression expr;
  bool tabulated = false;
  std::vector<double> table_x, table_v;  // strictly increasing abscissae

  static ScalarField from_expression(const std::string& text) {
    ScalarField f;
    f.expr = Expression(text);
    return f;
  }
  static ScalarField from_table(std::vector<double> x, std::vector<double> v);

  double eval(double x1, double x2, double x3) const;
  bool is_zero() const { return !tabulated && expr.is_zero_literal(); }
};

/// Limit force data (f_p, f_r, g1, g2). Plate components are functions of
/// (x1,x2); rod components are functions of x3. Tabulated fields interpolate
/// in x3 (rod) resp. are not supported for f_p (expressions there).
struct ForceData {
  std::array<ScalarField, 3> f_p;
  std::array<ScalarField, 3> f_r;
  std::array<ScalarField, 3> g1;
  std::array<ScalarField, 3> g2;
  double rod_length = 1.0;
  double scale = 1.0;  // uniform load factor (continuation)

  Vec3 f_p_at(double x1, double x2) const;
  Vec3 f_r_at(double x3) const;
  double fr3_at(double x3) const { return scale * f_r[2].eval(0, 0, x3); }
  Vec3 g1_at(double x3) const;
  Vec3 g2_at(double x3) const;
  bool all_zero() const;
  ForceData scaled(double t) const {
    ForceData c = *this;
    c.scale *= t;
    return c;
  }
};

enum class ForceRegion { Plate, Rod };

/// Scaled 3D body force of the thin structure at thickness delta.
Vec3 eval_f_delta(const ForceData& fd, const Vec3& x, double delta,
                  ForceRegion region);

/// F_{r,3}(x3) = int_{x3}^{L} f_{r,3}(s) ds, with F_{r,3}(L) = 0 exactly.
double antiderivative_Fr3(const ForceData& fd, double x3);

struct AdmissibilityThresholds {
  double threshold_p = 0.0;  // bound on ||f_p||_{L2(omega)}
  double threshold_r = 0.0;  // bound on ||f_{r,3}||_{L2(0,L)}
};

AdmissibilityThresholds default_thresholds(const MaterialParams& m, double L);

struct AdmissibilityReport {
  bool case1_holds = false;  // F_{r,3} >= 0 at all sampled points
  double fr3_norm = 0.0;
  double fp_norm = 0.0;
  double threshold_p = 0.0;
  double threshold_r = 0.0;
  double min_Fr3 = 0.0;
  enum class Verdict { Admissible, Inadmissible, Indeterminate } verdict =
      Verdict::Indeterminate;
};

AdmissibilityReport check_admissibility(const ForceData& fd,
                                        const PlateMesh& plate,
                                        const RodMesh& rod,
                                        const AdmissibilityThresholds& thr);

const char* verdict_name(AdmissibilityReport::Verdict v);

}  // namespace plarod
