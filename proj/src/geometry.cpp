#include "plarod/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace plarod {

void PlateDomain::validate() const {
  if (!(a1 > 1.0 && a2 > 1.0))
    throw std::invalid_argument(
        "plate domain: half-widths must exceed 1 so D(O,1) is compactly "
        "contained in omega");
  if (!(clamped[0] || clamped[1] || clamped[2] || clamped[3]))
    throw std::invalid_argument("plate domain: gamma_0 must be nonempty");
}

void RodDomain::validate() const {
  if (!(length > 0.0)) throw std::invalid_argument("rod domain: length must be positive");
  if (!(delta > 0.0 && delta < 1.0))
    throw std::invalid_argument("rod domain: delta must lie in (0,1)");
}

PlateMesh build_plate_mesh(const PlateDomain& dom, int nx, int ny, int gauss_order) {
  dom.validate();
  if (nx < 2 || ny < 2)
    throw std::invalid_argument("plate mesh: need at least 2 elements per axis");
  if (nx % 2 != 0 || ny % 2 != 0)
    throw std::invalid_argument(
        "plate mesh: element counts must be even so a node lands on the junction");
  if (gauss_order < 2) throw std::invalid_argument("plate mesh: gauss order >= 2");
  PlateMesh m;
  m.a1 = dom.a1;
  m.a2 = dom.a2;
  m.nx = nx;
  m.ny = ny;
  m.hx = 2.0 * dom.a1 / nx;
  m.hy = 2.0 * dom.a2 / ny;
  m.clamped = dom.clamped;
  m.gauss_order = gauss_order;
  m.origin_node = m.node_id(nx / 2, ny / 2);
  return m;
}

RodMesh build_rod_mesh(const RodDomain& dom, int n_elems, int gauss_order) {
  dom.validate();
  if (n_elems < 1) throw std::invalid_argument("rod mesh: need at least one element");
  if (gauss_order < 2) throw std::invalid_argument("rod mesh: gauss order >= 2");
  RodMesh m;
  m.length = dom.length;
  m.n_elems = n_elems;
  m.h = dom.length / n_elems;
  m.gauss_order = gauss_order;
  return m;
}

std::vector<ThinQuadrature::DiscPoint> disc_rule(int nr, int nt) {
  if (nr < 1 || nt < 4) throw std::invalid_argument("disc rule: nr >= 1, nt >= 4");
  std::vector<ThinQuadrature::DiscPoint> pts;
  pts.reserve(static_cast<std::size_t>(nr) * nt);
  // integral = int_0^1 int_0^{2pi} f r dtheta dr; substitute u = r^2 is not
  // used: plain Gauss in r with the r factor keeps weights positive.
  const GaussRule radial = mapped_rule(gauss_legendre(nr), 0.0, 1.0);
  const double dth = 2.0 * M_PI / nt;
  for (int k = 0; k < nr; ++k) {
    const double r = radial.nodes[k];
    const double wr = radial.weights[k] * r;
    for (int m = 0; m < nt; ++m) {
      const double th = dth * (m + 0.5);
      pts.push_back({r * std::cos(th), r * std::sin(th), wr * dth});
    }
  }
  return pts;
}

ThinQuadrature thin_quadrature(const PlateMesh& plate, const RodMesh& rod,
                               double delta, int order) {
  if (!(delta >= 0.0)) throw std::invalid_argument("thin quadrature: delta >= 0");
  if (order < 2) throw std::invalid_argument("thin quadrature: order >= 2");
  if (delta >= rod.length)
    throw std::invalid_argument(
        "thin quadrature: junction exclusion must end inside the rod");
  ThinQuadrature q;
  q.delta = delta;

  const GaussRule base = gauss_legendre(order);
  // plate: per-element tensor rule x X3 on ]-1,1[
  for (int e = 0; e < plate.n_elems(); ++e) {
    int ex, ey;
    plate.elem_cell(e, ex, ey);
    const GaussRule gx =
        mapped_rule(base, plate.node_x(ex), plate.node_x(ex + 1));
    const GaussRule gy =
        mapped_rule(base, plate.node_y(ey), plate.node_y(ey + 1));
    for (int a = 0; a < order; ++a)
      for (int b = 0; b < order; ++b)
        for (int c = 0; c < order; ++c) {
          const double w = gx.weights[a] * gy.weights[b] * base.weights[c];
          q.plate.push_back({gx.nodes[a], gy.nodes[b], base.nodes[c], w, e});
          q.plate_measure += w;
        }
  }

  // rod: disc rule x axial rule split at delta
  q.disc = disc_rule(order, std::max(8, 2 * order + 2));
  std::vector<std::pair<double, std::pair<double, bool>>> axial;  // x3,(w,excluded)
  auto push_segment = [&](double xa, double xb, bool excluded) {
    if (!(xb > xa)) return;
    const GaussRule g = mapped_rule(base, xa, xb);
    for (int c = 0; c < order; ++c)
      axial.push_back({g.nodes[c], {g.weights[c], excluded}});
  };
  for (int e = 0; e < rod.n_elems; ++e) {
    const double xa = rod.node_x(e), xb = rod.node_x(e + 1);
    if (delta <= xa) {
      push_segment(xa, xb, false);
    } else if (delta >= xb) {
      push_segment(xa, xb, true);
    } else {
      push_segment(xa, delta, true);
      push_segment(delta, xb, false);
    }
  }
  for (const auto& ax : axial) {
    q.rod_axial.push_back(ax.first);
    for (const auto& d : q.disc) {
      const double w = d.w * ax.second.first;
      q.rod.push_back({d.X1, d.X2, ax.first, w, ax.second.second});
      q.rod_measure += w;
    }
  }
  return q;
}

}  // namespace plarod
