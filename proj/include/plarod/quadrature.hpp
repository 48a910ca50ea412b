#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

namespace plarod {

struct GaussRule {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;  // sum to 2
};

// Gauss-Legendre rule with n points, exact for polynomials of degree 2n-1.
inline GaussRule gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
  GaussRule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    // Newton iteration from the Chebyshev estimate of the i-th root.
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    r.nodes[n - 1 - i] = x;
    r.weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return r;
}

// Maps a [-1,1] rule to [a,b].
inline GaussRule mapped_rule(const GaussRule& base, double a, double b) {
  GaussRule r = base;
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  for (std::size_t i = 0; i < r.nodes.size(); ++i) {
    r.nodes[i] = mid + half * base.nodes[i];
    r.weights[i] = half * base.weights[i];
  }
  return r;
}

template <class F>
double integrate(const GaussRule& rule, const F& f) {
  double s = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i)
    s += rule.weights[i] * f(rule.nodes[i]);
  return s;
}

// Composite Gauss integral of f over [a,b] with nsub equal subintervals.
template <class F>
double integrate_composite(const F& f, double a, double b, int nsub, int order) {
  if (b <= a) return 0.0;
  const GaussRule base = gauss_legendre(order);
  double s = 0.0;
  const double h = (b - a) / nsub;
  for (int k = 0; k < nsub; ++k) {
    const GaussRule sub = mapped_rule(base, a + k * h, a + (k + 1) * h);
    for (std::size_t i = 0; i < sub.nodes.size(); ++i)
      s += sub.weights[i] * f(sub.nodes[i]);
  }
  return s;
}

}  // namespace plarod
