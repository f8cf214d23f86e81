#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

namespace gktab {

/// Quadrature layout of the fill benchmark: m symmetric points on the outer
/// (observation) triangle, n Gauss-Legendre points on each of the source
/// triangle's three edges.
struct QuadratureSpec {
  int outer_points = 4;
  int inner_points_per_edge = 3;

  void validate() const {
    if (outer_points != 1 && outer_points != 3 && outer_points != 4 && outer_points != 6 &&
        outer_points != 7)
      throw std::invalid_argument("QuadratureSpec: outer_points must be one of 1, 3, 4, 6, 7");
    if (inner_points_per_edge < 1)
      throw std::invalid_argument("QuadratureSpec: inner_points_per_edge must be >= 1");
  }
};

/// Barycentric point with an area-normalized weight (weights sum to 1).
struct TrianglePoint {
  double b0, b1, b2, w;
};

/// Symmetric rules on the reference triangle. Degrees 1/2/3/4/5 for
/// m = 1/3/4/6/7 points.
inline std::span<const TrianglePoint> triangle_rule(int m) {
  static const TrianglePoint rule1[] = {
      {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 1.0},
  };
  static const TrianglePoint rule3[] = {
      {2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0, 1.0 / 3.0},
      {1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0, 1.0 / 3.0},
      {1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0, 1.0 / 3.0},
  };
  static const TrianglePoint rule4[] = {
      {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, -27.0 / 48.0},
      {0.6, 0.2, 0.2, 25.0 / 48.0},
      {0.2, 0.6, 0.2, 25.0 / 48.0},
      {0.2, 0.2, 0.6, 25.0 / 48.0},
  };
  static const TrianglePoint rule6[] = {
      {0.108103018168070, 0.445948490915965, 0.445948490915965, 0.223381589678011},
      {0.445948490915965, 0.108103018168070, 0.445948490915965, 0.223381589678011},
      {0.445948490915965, 0.445948490915965, 0.108103018168070, 0.223381589678011},
      {0.816847572980459, 0.091576213509771, 0.091576213509771, 0.109951743655322},
      {0.091576213509771, 0.816847572980459, 0.091576213509771, 0.109951743655322},
      {0.091576213509771, 0.091576213509771, 0.816847572980459, 0.109951743655322},
  };
  static const TrianglePoint rule7[] = {
      {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 0.225},
      {0.059715871789770, 0.470142064105115, 0.470142064105115, 0.132394152788506},
      {0.470142064105115, 0.059715871789770, 0.470142064105115, 0.132394152788506},
      {0.470142064105115, 0.470142064105115, 0.059715871789770, 0.132394152788506},
      {0.797426985353087, 0.101286507323456, 0.101286507323456, 0.125939180544827},
      {0.101286507323456, 0.797426985353087, 0.101286507323456, 0.125939180544827},
      {0.101286507323456, 0.101286507323456, 0.797426985353087, 0.125939180544827},
  };
  switch (m) {
    case 1: return {rule1, 1};
    case 3: return {rule3, 3};
    case 4: return {rule4, 4};
    case 6: return {rule6, 6};
    case 7: return {rule7, 7};
    default:
      throw std::invalid_argument("triangle_rule: unsupported point count (use 1, 3, 4, 6, 7)");
  }
}

/// Node/weight on the unit interval [0, 1]; weights sum to 1.
struct GaussPoint {
  double x, w;
};

/// n-point Gauss-Legendre rule mapped to [0, 1]. Nodes by Newton iteration on
/// the Legendre recurrence; accurate to machine precision for moderate n.
inline std::vector<GaussPoint> gauss_legendre_unit(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre_unit: n must be >= 1");
  std::vector<GaussPoint> pts(static_cast<std::size_t>(n));
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) /
                        (static_cast<double>(n) + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int j = 2; j <= n; ++j) {
        const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / static_cast<double>(j);
        p0 = p1;
        p1 = p2;
      }
      dp = n == 1 ? 1.0 : static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    pts[static_cast<std::size_t>(i)] = {(1.0 - x) / 2.0, w / 2.0};
    pts[static_cast<std::size_t>(n - 1 - i)] = {(1.0 + x) / 2.0, w / 2.0};
  }
  return pts;
}

}  // namespace gktab
