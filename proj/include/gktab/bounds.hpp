#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>

#include "gktab/evaluator.hpp"
#include "gktab/kernel.hpp"

namespace gktab {

enum class InterpMethod { Linear, Lagrange };

inline const char* method_name(InterpMethod m) {
  return m == InterpMethod::Linear ? "linear" : "lagrange";
}

namespace detail {

inline double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= static_cast<double>(i);
  return f;
}

}  // namespace detail

/// Upper bound on |d^m/dr^m f(r)| over [r_low, inf).
///
/// PlainExp: exactly k^m. GreenOverR: triangle inequality over the product-
/// rule expansion of exp(-jkr) * r^-1,
///   sum_{p=0}^{m} C(m,p) * k^p * (m-p)! / r_low^(m-p+1),
/// every term of which decays in r, so the left endpoint maximizes it.
inline double derivative_bound(KernelKind kind, double k, double r_low, int order) {
  if (order < 1) throw std::invalid_argument("derivative_bound: order must be >= 1");
  if (!(k >= 0.0)) throw std::invalid_argument("derivative_bound: k must be >= 0");
  if (kind == KernelKind::PlainExp) return std::pow(k, order);
  if (!(r_low > 0.0))
    throw std::domain_error("derivative_bound: exp(-jkr)/r needs r_low > 0");
  double sum = 0.0;
  double binom = 1.0;  // C(order, p)
  for (int p = 0; p <= order; ++p) {
    sum += binom * std::pow(k, p) * detail::factorial(order - p) /
           std::pow(r_low, order - p + 1);
    binom = binom * static_cast<double>(order - p) / static_cast<double>(p + 1);
  }
  return sum;
}

/// Worst-case absolute error of linear interpolation on an interval of width
/// h whose left end is at r_low: h^2 * max|f''| / 8.
inline double linear_bound(double h, KernelKind kind, double k, double r_low) {
  if (!(h > 0.0)) throw std::invalid_argument("linear_bound: h must be > 0");
  return h * h * derivative_bound(kind, k, r_low, 2) / 8.0;
}

/// Absolute error bound of Lagrange interpolation at a specific probe r over
/// the given stencil: prod_j |r - r_j| * max|f^(n+1)| / (n+1)!, with the
/// derivative maximized from the stencil's left end.
inline double lagrange_bound(std::span<const double> stencil, double r, KernelKind kind,
                             double k) {
  if (stencil.size() < 2)
    throw std::invalid_argument("lagrange_bound: stencil needs at least two nodes");
  for (std::size_t i = 1; i < stencil.size(); ++i)
    if (!(stencil[i] > stencil[i - 1]))
      throw std::invalid_argument("lagrange_bound: stencil must be strictly increasing");
  if (!(r >= stencil.front() && r <= stencil.back()))
    throw std::domain_error("lagrange_bound: r outside the stencil hull (extrapolation)");
  double prod = 1.0;
  for (double node : stencil) prod *= std::abs(r - node);
  const int n_plus_1 = static_cast<int>(stencil.size());
  return prod * derivative_bound(kind, k, stencil.front(), n_plus_1) /
         detail::factorial(n_plus_1);
}

/// A bound record for one stencil/interval, mostly for reporting.
struct ErrorBound {
  KernelKind kind = KernelKind::PlainExp;
  InterpMethod method = InterpMethod::Linear;
  int degree = 1;
  double a = 0.0;
  double b = 0.0;
  double bound_abs = 0.0;
  int derivative_order = 2;
};

inline ErrorBound interval_bound(KernelKind kind, double k, double a, double b) {
  if (!(b > a)) throw std::invalid_argument("interval_bound: need a < b");
  return {kind, InterpMethod::Linear, 1, a, b, linear_bound(b - a, kind, k, a), 2};
}

/// Per-stencil bound matched to an evaluator's actual stencil choice at r,
/// for either method. Used to check measured errors probe by probe.
inline double pointwise_bound(const KernelEvaluator& ev, KernelKind kind,
                              InterpMethod method, double r) {
  const auto& plan = ev.plan();
  const std::size_t j = locate(ev.hash(), plan, r);
  if (method == InterpMethod::Linear) {
    const double h = plan.abscissae[j + 1] - plan.abscissae[j];
    return linear_bound(h, kind, ev.k(), plan.abscissae[j]);
  }
  const int degree = ev.lagrange_degree();
  const auto width = static_cast<std::size_t>(degree) + 1;
  const auto back_shift = static_cast<std::size_t>((degree - 1) / 2);
  std::size_t start = j > back_shift ? j - back_shift : 0;
  if (start + width > plan.size()) start = plan.size() - width;
  return lagrange_bound({plan.abscissae.data() + start, width}, r, kind, ev.k());
}

/// Deterministic accuracy sweep against the analytic oracle.
struct ErrorSweepReport {
  std::size_t probe_count = 0;
  double max_rel_re = 0.0;    ///< max |re(f)-re(fi)| / |re(f)| over probes with re(f) != 0
  double max_rel_im = 0.0;    ///< same for the imaginary part
  double max_abs = 0.0;       ///< max |f - fi|
  double worst_r = 0.0;       ///< probe attaining the largest component relative error
  double max_abs_at_exact_zero = 0.0;  ///< abs error where a component is exactly 0
  /// Per-decade probe counts of the relative modulus error; slot d counts
  /// errors in [1e(d-20), 1e(d-19)), clamped at both ends.
  std::array<std::uint64_t, 24> decade_histogram{};
};

/// Probes the evaluator's full [r_min, r_max] range at probe_count uniformly
/// spaced points (endpoints included) with the chosen kernel and method.
inline ErrorSweepReport error_sweep(const KernelEvaluator& ev, KernelKind kind,
                                    InterpMethod method, std::size_t probe_count) {
  if (probe_count < 1) throw std::invalid_argument("error_sweep: need at least one probe");
  const auto& plan = ev.plan();
  const auto& table = kind == KernelKind::PlainExp ? ev.exp_table() : ev.green_table();
  const double a = plan.r_min();
  const double b = plan.r_max();
  const double span = b - a;

  ErrorSweepReport rep;
  rep.probe_count = probe_count;
  rep.worst_r = a;
  double worst_combined = -1.0;
  const double step =
      probe_count == 1 ? 0.0 : span / static_cast<double>(probe_count - 1);
  for (std::size_t i = 0; i < probe_count; ++i) {
    double r = i + 1 == probe_count ? b : a + static_cast<double>(i) * step;
    if (r < a) r = a;
    if (r > b) r = b;

    const Complex approx = method == InterpMethod::Linear
                               ? interp_linear(table, plan, ev.hash(), r)
                               : interp_lagrange(table, plan, ev.hash(),
                                                 ev.lagrange_degree(), r);
    const Complex exact = eval_analytic(kind, ev.k(), r);
    const double d_re = std::abs(approx.real() - exact.real());
    const double d_im = std::abs(approx.imag() - exact.imag());
    const double d_mod = std::abs(approx - exact);
    rep.max_abs = std::max(rep.max_abs, d_mod);

    double combined = 0.0;
    if (exact.real() != 0.0) {
      const double rel = d_re / std::abs(exact.real());
      rep.max_rel_re = std::max(rep.max_rel_re, rel);
      combined = std::max(combined, rel);
    } else if (d_re > 0.0) {
      rep.max_abs_at_exact_zero = std::max(rep.max_abs_at_exact_zero, d_re);
    }
    if (exact.imag() != 0.0) {
      const double rel = d_im / std::abs(exact.imag());
      rep.max_rel_im = std::max(rep.max_rel_im, rel);
      combined = std::max(combined, rel);
    } else if (d_im > 0.0) {
      rep.max_abs_at_exact_zero = std::max(rep.max_abs_at_exact_zero, d_im);
    }
    if (combined > worst_combined) {
      worst_combined = combined;
      rep.worst_r = r;
    }

    const double mod = std::abs(exact);
    if (mod > 0.0 && d_mod > 0.0) {
      const int decade = static_cast<int>(std::floor(std::log10(d_mod / mod))) + 20;
      const int slot = decade < 0 ? 0 : (decade > 23 ? 23 : decade);
      ++rep.decade_histogram[static_cast<std::size_t>(slot)];
    }
  }
  return rep;
}

}  // namespace gktab
