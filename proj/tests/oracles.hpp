// Independent oracles shared by the unit and acceptance suites. Everything
// here deliberately avoids the library's lookup/interpolation code paths.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "gktab/kernel.hpp"

namespace oracle {

/// Bracketing index by binary search: greatest j with abscissae[j] <= r,
/// clamped to the penultimate index so [j, j+1] always exists.
inline std::size_t locate_by_binary_search(const std::vector<double>& abscissae, double r) {
  auto it = std::upper_bound(abscissae.begin(), abscissae.end(), r);
  std::size_t j = it == abscissae.begin()
                      ? 0
                      : static_cast<std::size_t>(it - abscissae.begin()) - 1;
  const std::size_t last_pair = abscissae.size() - 2;
  return j < last_pair ? j : last_pair;
}

/// Zero crossings of cos(kr) and sin(kr) on [r_min, r_max] by a dense
/// sign-change scan followed by bisection. The scan extends one step past
/// both ends so crossings sitting exactly on a boundary are still seen; the
/// result is filtered back to the closed interval (1e-9 grace).
inline std::vector<double> scan_zero_crossings(double k, double r_min, double r_max,
                                               double step = 1e-6) {
  auto refine = [&](auto f, double lo, double hi) {
    for (int i = 0; i < 200; ++i) {
      const double mid = 0.5 * (lo + hi);
      if ((f(lo) < 0.0) != (f(mid) < 0.0))
        hi = mid;
      else
        lo = mid;
    }
    return 0.5 * (lo + hi);
  };
  const double lo_edge = std::max(r_min - step, 0.25 * r_min);
  const double hi_edge = r_max + step;
  std::vector<double> zeros;
  auto scan = [&](auto f) {
    double prev = lo_edge;
    double fprev = f(prev);
    for (double r = lo_edge + step; r <= hi_edge + 0.5 * step; r += step) {
      const double fr = f(r);
      if ((fprev < 0.0) != (fr < 0.0)) zeros.push_back(refine(f, prev, r));
      prev = r;
      fprev = fr;
    }
  };
  scan([&](double r) { return std::cos(k * r); });
  scan([&](double r) { return std::sin(k * r); });
  std::sort(zeros.begin(), zeros.end());
  // filter to range, collapse near-duplicates from the two scans
  std::vector<double> out;
  for (double z : zeros) {
    if (z < r_min - 1e-9 || z > r_max + 1e-9) continue;
    if (out.empty() || z - out.back() > 10.0 * step) out.push_back(z);
  }
  return out;
}

/// Central finite-difference |d^m/dr^m| of a kernel component, m in {1, 2}.
template <typename F>
double central_derivative(F f, double r, int order, double h) {
  if (order == 1) return (f(r + h) - f(r - h)) / (2.0 * h);
  return (f(r + h) - 2.0 * f(r) + f(r - h)) / (h * h);
}

}  // namespace oracle
