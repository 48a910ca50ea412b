#include "plarod/decomposition.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "plarod/quadrature.hpp"

namespace plarod {

Mat3 antisym(const Vec3& F) {
  Mat3 A;
  A << 0, -F(2), F(1), F(2), 0, -F(0), -F(1), F(0), 0;
  return A;
}

// ---------------------------------------------------------------------------
// sampling helpers
// ---------------------------------------------------------------------------

SampledField3D make_plate_samples(double a1, double a2, double delta, int n1,
                                  int n2, int n3,
                                  const std::function<Vec3(const Vec3&)>& field,
                                  bool is_deformation) {
  if (n1 < 2 || n2 < 2 || n3 < 2)
    throw std::invalid_argument("plate samples: need at least 2 nodes per axis");
  SampledField3D f;
  f.kind = SampledField3D::Kind::Plate;
  f.is_deformation = is_deformation;
  f.delta = delta;
  for (int i = 0; i < n1; ++i) f.x1s.push_back(-a1 + 2.0 * a1 * i / (n1 - 1));
  for (int i = 0; i < n2; ++i) f.x2s.push_back(-a2 + 2.0 * a2 * i / (n2 - 1));
  const GaussRule g = mapped_rule(gauss_legendre(n3), -delta, delta);
  f.x3s = g.nodes;
  f.x3w = g.weights;
  f.values.resize(static_cast<std::size_t>(n1) * n2 * n3);
  for (int i1 = 0; i1 < n1; ++i1)
    for (int i2 = 0; i2 < n2; ++i2)
      for (int i3 = 0; i3 < n3; ++i3)
        f.values[f.plate_index(i1, i2, i3)] = field(f.plate_point(i1, i2, i3));
  return f;
}

SampledField3D make_rod_samples(double delta, double x3_min, double x3_max,
                                int nsec, int nr, int nt,
                                const std::function<Vec3(const Vec3&)>& field,
                                bool is_deformation) {
  if (nsec < 2) throw std::invalid_argument("rod samples: need >= 2 sections");
  SampledField3D f;
  f.kind = SampledField3D::Kind::Rod;
  f.is_deformation = is_deformation;
  f.delta = delta;
  for (int i = 0; i < nsec; ++i)
    f.sections.push_back(x3_min + (x3_max - x3_min) * i / (nsec - 1));
  f.disc = disc_rule(nr, nt);
  f.values.resize(static_cast<std::size_t>(nsec) * f.disc.size());
  for (int s = 0; s < nsec; ++s)
    for (std::size_t p = 0; p < f.disc.size(); ++p)
      f.values[f.rod_index(s, static_cast<int>(p))] =
          field(f.rod_point(s, static_cast<int>(p)));
  return f;
}

SampledField3D sample_recovery_plate(const RecoveryField& rf, int n1, int n2,
                                     int n3) {
  const auto& plate = rf.ss->base->disc->plate;
  SampledField3D f = make_plate_samples(
      plate.a1, plate.a2, rf.delta, n1, n2, n3,
      [&](const Vec3& x) { return Vec3(rf.eval_plate(x) - x); }, false);
  f.gradient = [&rf](const Vec3& x) {
    return Mat3(rf.grad_plate(x) - Mat3::Identity());
  };
  return f;
}

SampledField3D sample_recovery_rod(const RecoveryField& rf, int nsec, int nr,
                                   int nt) {
  const auto& rod = rf.ss->base->disc->rod;
  SampledField3D f = make_rod_samples(
      rf.delta, 0.0, rod.length, nsec, nr, nt,
      [&](const Vec3& x) { return rf.eval_rod(x); }, true);
  f.gradient = [&rf](const Vec3& x) { return rf.grad_rod(x); };
  return f;
}

// ---------------------------------------------------------------------------
// seminorms
// ---------------------------------------------------------------------------

namespace {

// second-order first derivative on a non-uniform 3-point stencil
double fd_deriv(double fm, double f0, double fp, double hm, double hp) {
  return (fp * hm * hm - fm * hp * hp + f0 * (hp * hp - hm * hm)) /
         (hm * hp * (hm + hp));
}

template <class GetV, class GetX>
Vec3 fd_along(int i, int n, const GetV& val, const GetX& coord) {
  if (n < 2) return Vec3::Zero();
  if (i == 0) {
    const double h = coord(1) - coord(0);
    return (val(1) - val(0)) / h;
  }
  if (i == n - 1) {
    const double h = coord(n - 1) - coord(n - 2);
    return (val(n - 1) - val(n - 2)) / h;
  }
  const double hm = coord(i) - coord(i - 1), hp = coord(i + 1) - coord(i);
  Vec3 d;
  for (int c = 0; c < 3; ++c)
    d(c) = fd_deriv(val(i - 1)(c), val(i)(c), val(i + 1)(c), hm, hp);
  return d;
}

// Finite differences act on the displacement (identity handled analytically)
// so rigid fields come out exact.
Vec3 displacement_at(const SampledField3D& f, int idx, const Vec3& x) {
  return f.is_deformation ? Vec3(f.values[static_cast<std::size_t>(idx)] - x)
                          : f.values[static_cast<std::size_t>(idx)];
}

Mat3 plate_fd_gradient(const SampledField3D& f, int i1, int i2, int i3) {
  auto u = [&](int a, int b, int c) {
    return displacement_at(f, f.plate_index(a, b, c), f.plate_point(a, b, c));
  };
  Mat3 G;
  G.col(0) = fd_along(
      i1, static_cast<int>(f.x1s.size()), [&](int i) { return u(i, i2, i3); },
      [&](int i) { return f.x1s[i]; });
  G.col(1) = fd_along(
      i2, static_cast<int>(f.x2s.size()), [&](int i) { return u(i1, i, i3); },
      [&](int i) { return f.x2s[i]; });
  G.col(2) = fd_along(
      i3, static_cast<int>(f.x3s.size()), [&](int i) { return u(i1, i2, i); },
      [&](int i) { return f.x3s[i]; });
  return G;
}

// polar-grid gradient: radial/angular finite differences per section
Mat3 rod_fd_gradient(const SampledField3D& f, int isec, int ip, int nr, int nt) {
  const int k = ip / nt, m = ip % nt;
  const double X1 = f.disc[ip].X1, X2 = f.disc[ip].X2;
  const double r = f.delta * std::sqrt(X1 * X1 + X2 * X2);
  const Vec2 er(X1, X2);
  const Vec2 ern = er.normalized();
  const Vec2 et(-ern(1), ern(0));
  auto u = [&](int s, int p) {
    return displacement_at(f, f.rod_index(s, p), f.rod_point(s, p));
  };

  const Vec3 dr = fd_along(
      k, nr, [&](int kk) { return u(isec, kk * nt + m); },
      [&](int kk) {
        const auto& p = f.disc[kk * nt + m];
        return f.delta * std::sqrt(p.X1 * p.X1 + p.X2 * p.X2);
      });
  // periodic angular derivative
  const int mp = (m + 1) % nt, mm = (m + nt - 1) % nt;
  const double dth = 2.0 * M_PI / nt;
  const Vec3 dtheta = (u(isec, k * nt + mp) - u(isec, k * nt + mm)) / (2.0 * dth);
  const Vec3 daxial = fd_along(
      isec, static_cast<int>(f.sections.size()), [&](int s) { return u(s, ip); },
      [&](int s) { return f.sections[s]; });

  Mat3 G;
  G.col(0) = dr * ern(0) + dtheta * (et(0) / r);
  G.col(1) = dr * ern(1) + dtheta * (et(1) / r);
  G.col(2) = daxial;
  return G;
}

template <class PerPoint>
double l2_over_samples(const SampledField3D& f, const PerPoint& fn) {
  double acc = 0.0;
  if (f.kind == SampledField3D::Kind::Plate) {
    const int n1 = static_cast<int>(f.x1s.size());
    const int n2 = static_cast<int>(f.x2s.size());
    const int n3 = static_cast<int>(f.x3s.size());
    // trapezoid in-plane, Gauss through thickness
    for (int i1 = 0; i1 < n1; ++i1) {
      const double w1 = (i1 == 0 ? (f.x1s[1] - f.x1s[0]) / 2
                         : i1 == n1 - 1 ? (f.x1s[n1 - 1] - f.x1s[n1 - 2]) / 2
                                        : (f.x1s[i1 + 1] - f.x1s[i1 - 1]) / 2);
      for (int i2 = 0; i2 < n2; ++i2) {
        const double w2 = (i2 == 0 ? (f.x2s[1] - f.x2s[0]) / 2
                           : i2 == n2 - 1 ? (f.x2s[n2 - 1] - f.x2s[n2 - 2]) / 2
                                          : (f.x2s[i2 + 1] - f.x2s[i2 - 1]) / 2);
        for (int i3 = 0; i3 < n3; ++i3)
          acc += w1 * w2 * f.x3w[i3] * fn(f.plate_index(i1, i2, i3), i1, i2, i3);
      }
    }
  } else {
    const int nsec = static_cast<int>(f.sections.size());
    for (int s = 0; s < nsec; ++s) {
      const double w3 =
          (s == 0 ? (f.sections[1] - f.sections[0]) / 2
           : s == nsec - 1
               ? (f.sections[nsec - 1] - f.sections[nsec - 2]) / 2
               : (f.sections[s + 1] - f.sections[s - 1]) / 2);
      for (std::size_t p = 0; p < f.disc.size(); ++p)
        acc += w3 * f.disc[p].w * f.delta * f.delta *
               fn(f.rod_index(s, static_cast<int>(p)), s, static_cast<int>(p), 0);
    }
  }
  return acc;
}

// gradient of the DISPLACEMENT at a sample point
Mat3 sample_gradient(const SampledField3D& f, int a, int b, int c, int nr,
                     int nt) {
  if (f.gradient) {
    const Vec3 x = f.kind == SampledField3D::Kind::Plate
                       ? f.plate_point(a, b, c)
                       : f.rod_point(a, b);
    Mat3 G = f.gradient(x);
    if (f.is_deformation) G -= Mat3::Identity();
    return G;
  }
  if (f.kind == SampledField3D::Kind::Plate) return plate_fd_gradient(f, a, b, c);
  return rod_fd_gradient(f, a, b, nr, nt);
}

void rod_grid_shape(const SampledField3D& f, int& nr, int& nt) {
  // disc_rule layout: nr radial rings x nt angles
  nt = 0;
  const double r0 = std::hypot(f.disc[0].X1, f.disc[0].X2);
  for (std::size_t p = 0; p < f.disc.size(); ++p) {
    if (std::abs(std::hypot(f.disc[p].X1, f.disc[p].X2) - r0) > 1e-12) break;
    ++nt;
  }
  if (nt == 0 || f.disc.size() % nt != 0)
    throw std::invalid_argument("rod samples: disc points are not a polar grid");
  nr = static_cast<int>(f.disc.size()) / nt;
}

}  // namespace

double seminorm_Gs(const SampledField3D& u) {
  int nr = 0, nt = 0;
  if (u.kind == SampledField3D::Kind::Rod) rod_grid_shape(u, nr, nt);
  const double acc = l2_over_samples(u, [&](int, int a, int b, int c) {
    const Mat3 G = sample_gradient(u, a, b, c, nr, nt);
    return (G + G.transpose()).squaredNorm();
  });
  return std::sqrt(acc);
}

double seminorm_dist(const SampledField3D& v) {
  int nr = 0, nt = 0;
  if (v.kind == SampledField3D::Kind::Rod) rod_grid_shape(v, nr, nt);
  const double acc = l2_over_samples(v, [&](int, int a, int b, int c) {
    const Mat3 G = sample_gradient(v, a, b, c, nr, nt) + Mat3::Identity();
    const double dd = dist_SO3(G);
    return dd * dd;
  });
  return std::sqrt(acc);
}

// ---------------------------------------------------------------------------
// plate decomposition
// ---------------------------------------------------------------------------

DecomposedPlate decompose_plate(const SampledField3D& field) {
  if (field.kind != SampledField3D::Kind::Plate)
    throw std::invalid_argument("decompose_plate: plate samples required");
  const int n1 = static_cast<int>(field.x1s.size());
  const int n2 = static_cast<int>(field.x2s.size());
  const int n3 = static_cast<int>(field.x3s.size());
  const double delta = field.delta;

  DecomposedPlate out;
  out.U.resize(static_cast<std::size_t>(n1) * n2);
  out.R1.resize(static_cast<std::size_t>(n1) * n2);
  out.R2.resize(static_cast<std::size_t>(n1) * n2);
  out.warping.resize(field.values.size());

  const double inv_mass = 1.0 / (2.0 * delta);
  const double inv_mom = 3.0 / (2.0 * delta * delta * delta);

  for (int i1 = 0; i1 < n1; ++i1)
    for (int i2 = 0; i2 < n2; ++i2) {
      Vec3 mean = Vec3::Zero();
      double m1 = 0, m2 = 0;  // first x3-moments of u1, u2
      for (int i3 = 0; i3 < n3; ++i3) {
        Vec3 u = field.values[field.plate_index(i1, i2, i3)];
        if (field.is_deformation) u -= field.plate_point(i1, i2, i3);
        mean += field.x3w[i3] * u;
        m1 += field.x3w[i3] * field.x3s[i3] * u(0);
        m2 += field.x3w[i3] * field.x3s[i3] * u(1);
      }
      mean *= inv_mass;
      const double R2 = inv_mom * m1;   // u1 = ... + x3 R2
      const double R1 = -inv_mom * m2;  // u2 = ... - x3 R1
      const int pos = i1 * n2 + i2;
      out.U[pos] = mean;
      out.R1[pos] = R1;
      out.R2[pos] = R2;
      for (int i3 = 0; i3 < n3; ++i3) {
        Vec3 u = field.values[field.plate_index(i1, i2, i3)];
        if (field.is_deformation) u -= field.plate_point(i1, i2, i3);
        const double x3 = field.x3s[i3];
        Vec3 elem = mean + x3 * Vec3(R2, -R1, 0.0);
        out.warping[field.plate_index(i1, i2, i3)] = u - elem;
      }
      // warping moment conditions at this in-plane position
      Vec3 mom0 = Vec3::Zero();
      double mom1a = 0, mom1b = 0;
      for (int i3 = 0; i3 < n3; ++i3) {
        const Vec3& wbar = out.warping[field.plate_index(i1, i2, i3)];
        mom0 += field.x3w[i3] * wbar;
        mom1a += field.x3w[i3] * field.x3s[i3] * wbar(0);
        mom1b += field.x3w[i3] * field.x3s[i3] * wbar(1);
      }
      out.max_moment0 = std::max(out.max_moment0, mom0.cwiseAbs().maxCoeff());
      out.max_moment1 =
          std::max({out.max_moment1, std::abs(mom1a), std::abs(mom1b)});
    }
  // reconstruction is exact by construction; report the identity defect
  for (int i1 = 0; i1 < n1; ++i1)
    for (int i2 = 0; i2 < n2; ++i2)
      for (int i3 = 0; i3 < n3; ++i3) {
        const int idx = field.plate_index(i1, i2, i3);
        Vec3 u = field.values[idx];
        if (field.is_deformation) u -= field.plate_point(i1, i2, i3);
        const int pos = i1 * n2 + i2;
        const Vec3 rec = out.U[pos] +
                         field.x3s[i3] * Vec3(out.R2[pos], -out.R1[pos], 0.0) +
                         out.warping[idx];
        out.max_reconstruction_residual = std::max(
            out.max_reconstruction_residual, (u - rec).cwiseAbs().maxCoeff());
      }
  return out;
}

// ---------------------------------------------------------------------------
// rod decomposition
// ---------------------------------------------------------------------------

namespace {

Mat3 procrustes_rotation(const Vec3& M1, const Vec3& M2, bool& degenerate) {
  Mat3 N = M1 * Vec3::UnitX().transpose() + M2 * Vec3::UnitY().transpose();
  Eigen::JacobiSVD<Mat3> svd(N, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vec3 sv = svd.singularValues();
  degenerate = !(sv(1) > 1e-12 * std::max(1.0, sv(0)));
  Mat3 D = Mat3::Identity();
  D(2, 2) = (svd.matrixU() * svd.matrixV().transpose()).determinant() < 0 ? -1.0 : 1.0;
  return svd.matrixU() * D * svd.matrixV().transpose();
}

}  // namespace

void split_centerline(const std::vector<double>& sections,
                      const std::vector<Vec3>& W, const std::vector<Mat3>& Q,
                      std::vector<Vec3>& Wm, std::vector<Vec3>& Ws) {
  const int n = static_cast<int>(sections.size());
  // W(0) and the cumulative integral int_0^{x3} (Q - I) e3, trapezoidal in
  // the section grid with the anchor interpolated at x3 = 0.
  std::vector<Vec3> qe(n);
  for (int i = 0; i < n; ++i) qe[i] = (Q[i] - Mat3::Identity()) * Vec3::UnitZ();

  std::vector<Vec3> cum(n, Vec3::Zero());
  for (int i = 1; i < n; ++i)
    cum[i] = cum[i - 1] +
             0.5 * (sections[i] - sections[i - 1]) * (qe[i] + qe[i - 1]);

  auto interp = [&](const std::vector<Vec3>& vals, double x) {
    if (x <= sections.front()) return vals.front();
    if (x >= sections.back()) return vals.back();
    const auto it = std::upper_bound(sections.begin(), sections.end(), x);
    const int k = static_cast<int>(it - sections.begin());
    const double t = (x - sections[k - 1]) / (sections[k] - sections[k - 1]);
    return Vec3((1 - t) * vals[k - 1] + t * vals[k]);
  };
  const Vec3 cum0 = interp(cum, 0.0);
  const Vec3 W0 = interp(W, 0.0);

  Wm.resize(n);
  Ws.resize(n);
  for (int i = 0; i < n; ++i) {
    Wm[i] = W0 + cum[i] - cum0;
    Ws[i] = W[i] - Wm[i];
  }
}

DecomposedRod decompose_rod(const SampledField3D& field) {
  if (field.kind != SampledField3D::Kind::Rod)
    throw std::invalid_argument("decompose_rod: rod samples required");
  const int nsec = static_cast<int>(field.sections.size());
  const int npts = static_cast<int>(field.disc.size());
  const double delta = field.delta;

  DecomposedRod out;
  out.W.resize(nsec);
  out.Q.resize(nsec);
  out.warping.resize(field.values.size());

  const double disc_area = M_PI * delta * delta;
  double warp2 = 0.0, warp_meas = 0.0;
  for (int s = 0; s < nsec; ++s) {
    const double x3 = field.sections[s];
    Vec3 mean = Vec3::Zero();
    for (int p = 0; p < npts; ++p) {
      Vec3 v = field.values[field.rod_index(s, p)];
      if (!field.is_deformation) v += field.rod_point(s, p);
      mean += field.disc[p].w * delta * delta * v;
    }
    mean /= disc_area;
    out.W[s] = mean - x3 * Vec3::UnitZ();

    Vec3 P1 = Vec3::Zero(), P2 = Vec3::Zero();
    for (int p = 0; p < npts; ++p) {
      Vec3 v = field.values[field.rod_index(s, p)];
      if (!field.is_deformation) v += field.rod_point(s, p);
      const double w = field.disc[p].w * delta * delta;
      P1 += w * (delta * field.disc[p].X1) * (v - mean);
      P2 += w * (delta * field.disc[p].X2) * (v - mean);
    }
    const double scale = 2.0 / (M_PI * delta * delta * delta * delta);
    bool deg = false;
    Mat3 Q = procrustes_rotation(scale * P1, scale * P2, deg);
    if (deg) {
      out.degenerate = true;
      Q = s > 0 ? out.Q[s - 1] : Mat3::Identity();
    }
    out.Q[s] = Q;
    const Vec3 qe = (Q - Mat3::Identity()) * Vec3::UnitZ();
    out.max_identity_residual =
        std::max(out.max_identity_residual,
                 std::abs(qe(2) + 0.5 * qe.squaredNorm()));

    // elementary deformation: V(x3) + Q xperp; warping is the remainder
    for (int p = 0; p < npts; ++p) {
      Vec3 v = field.values[field.rod_index(s, p)];
      if (!field.is_deformation) v += field.rod_point(s, p);
      const Vec3 xperp(delta * field.disc[p].X1, delta * field.disc[p].X2, 0.0);
      const Vec3 resid = v - (mean + Q * xperp);
      out.warping[field.rod_index(s, p)] = resid;
      warp2 += field.disc[p].w * delta * delta * resid.squaredNorm();
      warp_meas += field.disc[p].w * delta * delta;
    }
  }
  out.rms_warping = std::sqrt(warp2 / std::max(warp_meas, 1e-300));

  // reconstruction: v = V + Q xperp + warping, exact by construction
  for (int s = 0; s < nsec; ++s)
    for (int p = 0; p < npts; ++p) {
      Vec3 v = field.values[field.rod_index(s, p)];
      if (!field.is_deformation) v += field.rod_point(s, p);
      const Vec3 xperp(delta * field.disc[p].X1, delta * field.disc[p].X2, 0.0);
      const Vec3 mean = out.W[s] + field.sections[s] * Vec3::UnitZ();
      const Vec3 rec = mean + out.Q[s] * xperp + out.warping[field.rod_index(s, p)];
      out.max_reconstruction_residual = std::max(
          out.max_reconstruction_residual, (v - rec).cwiseAbs().maxCoeff());
    }

  split_centerline(field.sections, out.W, out.Q, out.Wm, out.Ws);
  return out;
}

// ---------------------------------------------------------------------------
// file io
// ---------------------------------------------------------------------------

namespace {

[[noreturn]] void file_error(const std::string& path, int row,
                             const std::string& what) {
  throw std::runtime_error("sampled field '" + path + "', row " +
                           std::to_string(row) + ": " + what);
}

}  // namespace

SampledField3D read_sampled_field(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open sampled field '" + path + "'");
  std::string header;
  int row = 1;
  if (!std::getline(in, header)) file_error(path, row, "missing header");
  std::istringstream hs(header);
  std::string kind, flavor;
  SampledField3D f;
  hs >> kind;
  std::size_t expected = 0;
  int n1 = 0, n2 = 0, n3 = 0;
  if (kind == "plate") {
    if (!(hs >> n1 >> n2 >> n3 >> f.delta))
      file_error(path, row, "plate header needs: n1 n2 n3 delta");
    f.kind = SampledField3D::Kind::Plate;
    f.is_deformation = false;
    expected = static_cast<std::size_t>(n1) * n2 * n3;
  } else if (kind == "rod") {
    if (!(hs >> n1 >> n2 >> n3 >> f.delta))
      file_error(path, row, "rod header needs: nsec nr nt delta");
    f.kind = SampledField3D::Kind::Rod;
    f.is_deformation = true;
    expected = static_cast<std::size_t>(n1) * n2 * n3;
  } else {
    file_error(path, row, "unknown kind '" + kind + "'");
  }
  if (hs >> flavor) {
    if (flavor == "deformation")
      f.is_deformation = true;
    else if (flavor == "displacement")
      f.is_deformation = false;
    else
      file_error(path, row, "unknown flavor '" + flavor + "'");
  }

  std::vector<Vec3> coords;
  coords.reserve(expected);
  f.values.reserve(expected);
  std::string line;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    double x1, x2, x3, v1, v2, v3;
    if (!(ls >> x1 >> x2 >> x3 >> v1 >> v2 >> v3))
      file_error(path, row, "expected 6 numeric columns");
    coords.emplace_back(x1, x2, x3);
    f.values.emplace_back(v1, v2, v3);
  }
  if (f.values.size() != expected)
    file_error(path, row,
               "expected " + std::to_string(expected) + " samples, got " +
                   std::to_string(f.values.size()));

  if (f.kind == SampledField3D::Kind::Plate) {
    // recover the tensor grid; x3 must be the Gauss nodes on (-delta, delta)
    for (int i = 0; i < n1; ++i) f.x1s.push_back(coords[static_cast<std::size_t>(i) * n2 * n3](0));
    for (int i = 0; i < n2; ++i) f.x2s.push_back(coords[static_cast<std::size_t>(i) * n3](1));
    const GaussRule g = mapped_rule(gauss_legendre(n3), -f.delta, f.delta);
    f.x3s = g.nodes;
    f.x3w = g.weights;
    for (std::size_t i = 0; i < expected; ++i) {
      const int i1 = static_cast<int>(i) / (n2 * n3);
      const int i2 = (static_cast<int>(i) / n3) % n2;
      const int i3 = static_cast<int>(i) % n3;
      const Vec3 want = f.plate_point(i1, i2, i3);
      if ((coords[i] - want).cwiseAbs().maxCoeff() > 1e-9 * (1 + f.delta))
        file_error(path, static_cast<int>(i) + 2,
                   "coordinates do not match the declared tensor grid");
    }
  } else {
    for (int s = 0; s < n1; ++s)
      f.sections.push_back(coords[static_cast<std::size_t>(s) * n2 * n3](2));
    for (int s = 1; s < n1; ++s)
      if (!(f.sections[s] > f.sections[s - 1]))
        file_error(path, 2, "sections must increase strictly");
    f.disc = disc_rule(n2, n3);
    for (std::size_t i = 0; i < expected; ++i) {
      const int s = static_cast<int>(i) / (n2 * n3);
      const int p = static_cast<int>(i) % (n2 * n3);
      const Vec3 want = f.rod_point(s, p);
      if ((coords[i] - want).cwiseAbs().maxCoeff() > 1e-9 * (1 + f.delta))
        file_error(path, static_cast<int>(i) + 2,
                   "coordinates do not match the declared polar grid");
    }
  }
  return f;
}

void write_sampled_field(const std::string& path, const SampledField3D& f) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write sampled field '" + path + "'");
  out.precision(17);
  if (f.kind == SampledField3D::Kind::Plate) {
    out << "plate " << f.x1s.size() << ' ' << f.x2s.size() << ' ' << f.x3s.size()
        << ' ' << f.delta << (f.is_deformation ? " deformation" : " displacement")
        << '\n';
    for (std::size_t i1 = 0; i1 < f.x1s.size(); ++i1)
      for (std::size_t i2 = 0; i2 < f.x2s.size(); ++i2)
        for (std::size_t i3 = 0; i3 < f.x3s.size(); ++i3) {
          const Vec3 x = f.plate_point(static_cast<int>(i1), static_cast<int>(i2),
                                       static_cast<int>(i3));
          const Vec3& v = f.values[f.plate_index(
              static_cast<int>(i1), static_cast<int>(i2), static_cast<int>(i3))];
          out << x(0) << ' ' << x(1) << ' ' << x(2) << ' ' << v(0) << ' ' << v(1)
              << ' ' << v(2) << '\n';
        }
  } else {
    int nr = 0, nt = 0;
    rod_grid_shape(f, nr, nt);
    out << "rod " << f.sections.size() << ' ' << nr << ' ' << nt << ' ' << f.delta
        << (f.is_deformation ? " deformation" : " displacement") << '\n';
    for (std::size_t s = 0; s < f.sections.size(); ++s)
      for (std::size_t p = 0; p < f.disc.size(); ++p) {
        const Vec3 x = f.rod_point(static_cast<int>(s), static_cast<int>(p));
        const Vec3& v =
            f.values[f.rod_index(static_cast<int>(s), static_cast<int>(p))];
        out << x(0) << ' ' << x(1) << ' ' << x(2) << ' ' << v(0) << ' ' << v(1)
            << ' ' << v(2) << '\n';
      }
  }
}

}  // namespace plarod
