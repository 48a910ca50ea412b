#pragma once

#include <functional>
#include <string>
#include <vector>

#include "plarod/geometry.hpp"
#include "plarod/material.hpp"
#include "plarod/recovery.hpp"

namespace plarod {

/// A_F x = F x (cross product) for all x; exactly antisymmetric.
Mat3 antisym(const Vec3& F);

/// A 3-component field sampled on the tensor grid of a thin plate
/// Omega_delta = [-a1,a1]x[-a2,a2]x(-delta,delta) or a rod
/// B_delta = D_delta x (sections). Plate x3 nodes are thickness Gauss points;
/// rod cross-sections carry a polar disc rule.
struct SampledField3D {
  enum class Kind { Plate, Rod };
  Kind kind = Kind::Plate;
  bool is_deformation = false;  // v = Id + u
  double delta = 0.0;

  // plate grid
  std::vector<double> x1s, x2s;
  std::vector<double> x3s, x3w;  // Gauss nodes/weights on (-delta, delta)

  // rod grid
  std::vector<double> sections;                 // increasing x3 values
  std::vector<ThinQuadrature::DiscPoint> disc;  // unit rule; physical = delta*X

  std::vector<Vec3> values;
  std::function<Mat3(const Vec3&)> gradient;  // optional analytic gradient

  int plate_index(int i1, int i2, int i3) const {
    return (i1 * static_cast<int>(x2s.size()) + i2) * static_cast<int>(x3s.size()) + i3;
  }
  int rod_index(int isec, int ip) const {
    return isec * static_cast<int>(disc.size()) + ip;
  }
  Vec3 plate_point(int i1, int i2, int i3) const {
    return {x1s[i1], x2s[i2], x3s[i3]};
  }
  Vec3 rod_point(int isec, int ip) const {
    return {delta * disc[ip].X1, delta * disc[ip].X2, sections[isec]};
  }
};

SampledField3D make_plate_samples(double a1, double a2, double delta, int n1,
                                  int n2, int n3,
                                  const std::function<Vec3(const Vec3&)>& field,
                                  bool is_deformation = false);
SampledField3D make_rod_samples(double delta, double x3_min, double x3_max,
                                int nsec, int nr, int nt,
                                const std::function<Vec3(const Vec3&)>& field,
                                bool is_deformation = true);

// The returned field borrows rf through its gradient callback; keep the
// recovery field alive while the samples are in use.
SampledField3D sample_recovery_plate(const RecoveryField& rf, int n1, int n2,
                                     int n3);
SampledField3D sample_recovery_rod(const RecoveryField& rf, int nsec, int nr,
                                   int nt);

/// L2 norm of grad u + (grad u)^T over the sampled domain (displacement u).
double seminorm_Gs(const SampledField3D& u);
/// L2 norm of dist(grad v, SO(3)) over the sampled domain (deformation v).
double seminorm_dist(const SampledField3D& v);

struct DecomposedPlate {
  std::vector<Vec3> U;                  // per (i1,i2): through-thickness mean
  std::vector<double> R1, R2;           // rotation components
  std::vector<Vec3> warping;            // per sample
  double max_reconstruction_residual = 0.0;
  double max_moment0 = 0.0;  // |int warping dx3|
  double max_moment1 = 0.0;  // |int x3 warping_alpha dx3|
};

DecomposedPlate decompose_plate(const SampledField3D& u);

struct DecomposedRod {
  std::vector<Vec3> W;        // center-line displacement per section
  std::vector<Mat3> Q;        // best-fit section rotation (Procrustes)
  std::vector<Vec3> Wm, Ws;   // main/stretching split
  std::vector<Vec3> warping;  // per sample (least-squares remainder)
  double max_reconstruction_residual = 0.0;  // |v - elementary - warping|
  double rms_warping = 0.0;
  double max_identity_residual = 0.0;  // |(Q-I)e3.e3 + 1/2|(Q-I)e3|^2|
  bool degenerate = false;
};

DecomposedRod decompose_rod(const SampledField3D& v);

/// Recomputes the split of an already-decomposed rod (exposed for tests).
void split_centerline(const std::vector<double>& sections,
                      const std::vector<Vec3>& W, const std::vector<Mat3>& Q,
                      std::vector<Vec3>& Wm, std::vector<Vec3>& Ws);

// columnar text files:  "plate n1 n2 n3 delta [displacement|deformation]"
// or "rod nsec nr nt delta [deformation|displacement]" header, then one
// "x1 x2 x3 v1 v2 v3" row per sample.
SampledField3D read_sampled_field(const std::string& path);
void write_sampled_field(const std::string& path, const SampledField3D& f);

}  // namespace plarod
