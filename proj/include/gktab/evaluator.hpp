#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "gktab/kernel.hpp"
#include "gktab/sampling.hpp"
#include "gktab/table.hpp"

namespace gktab {

/// Linear interpolation between the bracketing pair of r. Weights depend only
/// on the abscissae, so real and imaginary parts share them; a probe equal to
/// a node reproduces the stored value exactly (weights become exactly 1 and 0).
inline Complex interp_linear(const KernelTable& table, const SamplingPlan& plan,
                             const HashIndex& hash, double r) {
  const std::size_t j = locate(hash, plan, r);
  const double r0 = plan.abscissae[j];
  const double r1 = plan.abscissae[j + 1];
  const double w0 = (r - r1) / (r0 - r1);
  const double w1 = (r - r0) / (r1 - r0);
  return table.values[j] * w0 + table.values[j + 1] * w1;
}

/// Lagrange interpolation over degree+1 consecutive abscissae via the
/// cardinal-product formula. The stencil starts at locate(r) - (degree-1)/2
/// so the bracketing pair sits as centrally as possible, clamped at the table
/// ends. Nodes are reproduced exactly: a probe equal to a stencil node takes
/// the stored value directly in the unrolled path, and in the generic path
/// the matching cardinal evaluates to exactly 1 (identical factors in
/// numerator and denominator) while every other one carries an exactly zero
/// factor.
inline Complex interp_lagrange(const KernelTable& table, const SamplingPlan& plan,
                               const HashIndex& hash, int degree, double r) {
  if (degree < 1) throw std::invalid_argument("interp_lagrange: degree must be >= 1");
  const auto width = static_cast<std::size_t>(degree) + 1;
  const std::size_t count = plan.abscissae.size();
  if (width > count)
    throw std::invalid_argument("interp_lagrange: stencil wider than the table");

  const std::size_t j = locate(hash, plan, r);
  const auto back_shift = static_cast<std::size_t>((degree - 1) / 2);
  std::size_t start = j > back_shift ? j - back_shift : 0;
  if (start + width > count) start = count - width;

  const double* nodes = plan.abscissae.data() + start;
  const Complex* vals = table.values.data() + start;

  if (degree == 3) {  // the default stencil, unrolled
    const double d0 = r - nodes[0];
    const double d1 = r - nodes[1];
    const double d2 = r - nodes[2];
    const double d3 = r - nodes[3];
    if (d0 == 0.0) return vals[0];
    if (d1 == 0.0) return vals[1];
    if (d2 == 0.0) return vals[2];
    if (d3 == 0.0) return vals[3];
    const double e01 = nodes[0] - nodes[1];
    const double e02 = nodes[0] - nodes[2];
    const double e03 = nodes[0] - nodes[3];
    const double e12 = nodes[1] - nodes[2];
    const double e13 = nodes[1] - nodes[3];
    const double e23 = nodes[2] - nodes[3];
    const double s01 = d0 * d1;
    const double s23 = d2 * d3;
    const double w0 = (d1 * s23) / ((e01 * e02) * e03);
    const double w1 = (d0 * s23) / (-((e01 * e12) * e13));
    const double w2 = (s01 * d3) / ((e02 * e12) * e23);
    const double w3 = (s01 * d2) / (-((e03 * e13) * e23));
    return {vals[0].real() * w0 + vals[1].real() * w1 + vals[2].real() * w2 +
                vals[3].real() * w3,
            vals[0].imag() * w0 + vals[1].imag() * w1 + vals[2].imag() * w2 +
                vals[3].imag() * w3};
  }

  Complex acc{0.0, 0.0};
  for (std::size_t a = 0; a < width; ++a) {
    double num = 1.0;
    double den = 1.0;
    for (std::size_t m = 0; m < width; ++m) {
      if (m == a) continue;
      num *= r - nodes[m];
      den *= nodes[a] - nodes[m];
    }
    acc += vals[a] * (num / den);
  }
  return acc;
}

/// The single evaluation entry point: both kernel tables over one shared
/// plan, the hash index, and the analytic fallback below r_min.
///
/// Immutable after construction except the fallback counter, which is atomic
/// so concurrent evaluators keep an exact total.
class KernelEvaluator {
 public:
  KernelEvaluator(SamplingPlan plan, double k, int lagrange_degree = 3)
      : plan_(std::move(plan)), k_(k), degree_(lagrange_degree) {
    if (degree_ < 1)
      throw std::invalid_argument("KernelEvaluator: lagrange_degree must be >= 1");
    if (static_cast<std::size_t>(degree_) + 1 > plan_.size())
      throw std::invalid_argument("KernelEvaluator: table smaller than the Lagrange stencil");
    exp_table_ = build_table(plan_, KernelKind::PlainExp, k_);
    green_table_ = build_table(plan_, KernelKind::GreenOverR, k_);
    hash_ = build_hash(plan_);
    if (degree_ == 3) pack_green_stencils();
  }

  KernelEvaluator(const KernelEvaluator&) = delete;
  KernelEvaluator& operator=(const KernelEvaluator&) = delete;
  KernelEvaluator(KernelEvaluator&& other) noexcept
      : plan_(std::move(other.plan_)),
        exp_table_(std::move(other.exp_table_)),
        green_table_(std::move(other.green_table_)),
        hash_(std::move(other.hash_)),
        k_(other.k_),
        degree_(other.degree_),
        green_nodes_(std::move(other.green_nodes_)),
        green_inv_den_(std::move(other.green_inv_den_)),
        fallbacks_(other.fallbacks_.load(std::memory_order_relaxed)) {}
  KernelEvaluator& operator=(KernelEvaluator&&) = delete;

  /// exp(-jkr) by linear interpolation; r must lie in [r_min, r_max].
  Complex eval_exp(double r) const { return interp_linear(exp_table_, plan_, hash_, r); }

  /// exp(-jkr)/r by Lagrange interpolation; r must lie in [r_min, r_max].
  ///
  /// The default degree runs on an interleaved copy of the table with
  /// precomputed cardinal denominators; probes equal to a node still return
  /// the stored value exactly.
  Complex eval_green(double r) const {
    if (degree_ != 3) return interp_lagrange(green_table_, plan_, hash_, degree_, r);
    if (!(r >= hash_.r_min && r <= hash_.r_max))
      throw std::out_of_range("eval_green: r outside the tabulated range");
    return green_from_bucket(hash_.buckets[hash_.bucket_of(r)], r);
  }

  /// Weighted sum of eval_kernel(GreenOverR, r) over a block; per-point
  /// values match the scalar calls, accumulated in two interleaved pairs.
  /// Bucket reads are staged first so their latency overlaps; anything
  /// outside the table (the analytic fallback region included) takes the
  /// scalar path in place.
  Complex accumulate_green(std::span<const double> radii,
                           std::span<const double> weights) const {
    constexpr std::size_t kMaxBlock = 4096;
    constexpr std::uint32_t kScalar = 0xffffffffu;
    const std::size_t count = radii.size();
    if (degree_ != 3 || count > kMaxBlock) {
      Complex acc{0.0, 0.0};
      for (std::size_t i = 0; i < count; ++i)
        acc += eval_kernel(KernelKind::GreenOverR, radii[i]) * weights[i];
      return acc;
    }
    std::uint32_t staged[kMaxBlock];
    for (std::size_t i = 0; i < count; ++i) {
      const double r = radii[i];
      if (r >= hash_.r_min && r <= hash_.r_max) {
        const std::uint32_t j = hash_.buckets[hash_.bucket_of(r)];
        staged[i] = j;
#if defined(__GNUC__) || defined(__clang__)
        std::size_t s0 = j > 0 ? static_cast<std::size_t>(j) - 1 : 0;
        const std::size_t last_start = plan_.size() - 4;
        if (s0 > last_start) s0 = last_start;
        __builtin_prefetch(green_nodes_.data() + s0);
        __builtin_prefetch(green_nodes_.data() + s0 + 3);
        __builtin_prefetch(green_inv_den_.data() + 4 * s0);
#endif
      } else {
        staged[i] = kScalar;
      }
    }
    // two accumulator pairs keep the additions off the critical path
    double re0 = 0.0, im0 = 0.0, re1 = 0.0, im1 = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
      const Complex value = staged[i] == kScalar
                                ? eval_kernel(KernelKind::GreenOverR, radii[i])
                                : green_from_bucket(staged[i], radii[i]);
      if (i & 1) {
        re1 += value.real() * weights[i];
        im1 += value.imag() * weights[i];
      } else {
        re0 += value.real() * weights[i];
        im0 += value.imag() * weights[i];
      }
    }
    return {re0 + re1, im0 + im1};
  }

  /// Dispatches to the interpolated path for r >= r_min and falls back to
  /// direct analytic evaluation below it (the near-singular region the tables
  /// deliberately exclude), counting every fallback.
  Complex eval_kernel(KernelKind kind, double r) const {
    if (r >= plan_.r_min()) [[likely]]
      return kind == KernelKind::PlainExp ? eval_exp(r) : eval_green(r);
    const Complex value = eval_analytic(kind, k_, r);
    fallbacks_.fetch_add(1, std::memory_order_relaxed);
    return value;
  }

  /// Elementwise eval_kernel over a batch; the first invalid radius aborts
  /// with its index reported.
  std::vector<Complex> eval_batch(KernelKind kind, std::span<const double> radii) const {
    std::vector<Complex> out;
    out.reserve(radii.size());
    for (std::size_t i = 0; i < radii.size(); ++i) {
      try {
        out.push_back(eval_kernel(kind, radii[i]));
      } catch (const std::exception& e) {
        throw std::invalid_argument("eval_batch: radius [" + std::to_string(i) +
                                    "] = " + std::to_string(radii[i]) + ": " + e.what());
      }
    }
    return out;
  }

  const SamplingPlan& plan() const { return plan_; }
  const KernelTable& exp_table() const { return exp_table_; }
  const KernelTable& green_table() const { return green_table_; }
  const HashIndex& hash() const { return hash_; }
  double k() const { return k_; }
  int lagrange_degree() const { return degree_; }
  std::uint64_t fallback_count() const { return fallbacks_.load(std::memory_order_relaxed); }

 private:
  struct PackedNode {
    double r, re, im;
  };

  /// Degree-3 kernel of eval_green once the bucket value is known.
  Complex green_from_bucket(std::size_t bucket_value, double r) const {
    const PackedNode* nodes = green_nodes_.data();
    const std::size_t n = plan_.size();  // green_nodes_ carries two sentinels
    const std::size_t j = bucket_value;
    // Bracketing correction, flattened: the backward guard can only fire when
    // neither forward step does, and the second forward step implies the
    // first (radii increase), so the three tests combine additively and their
    // loads issue in parallel. Sentinels keep j+2 readable.
    const auto back = static_cast<std::size_t>(j > 0 && r < nodes[j].r);
    const auto fwd1 = static_cast<std::size_t>(nodes[j + 1].r <= r);
    const auto fwd2 = static_cast<std::size_t>(nodes[j + 2].r <= r);
    std::size_t jc = j - back + fwd1 + fwd2;
    const std::size_t last_pair = n - 2;
    if (jc > last_pair) jc = last_pair;
    std::size_t start = jc > 0 ? jc - 1 : 0;
    if (start + 4 > n) start = n - 4;

    const PackedNode* s = nodes + start;
    const double d0 = r - s[0].r;
    const double d1 = r - s[1].r;
    const double d2 = r - s[2].r;
    const double d3 = r - s[3].r;
    if (d0 == 0.0) return {s[0].re, s[0].im};
    if (d1 == 0.0) return {s[1].re, s[1].im};
    if (d2 == 0.0) return {s[2].re, s[2].im};
    if (d3 == 0.0) return {s[3].re, s[3].im};
    const double* inv = green_inv_den_.data() + 4 * start;
    const double s01 = d0 * d1;
    const double s23 = d2 * d3;
    const double w0 = (d1 * s23) * inv[0];
    const double w1 = (d0 * s23) * inv[1];
    const double w2 = (s01 * d3) * inv[2];
    const double w3 = (s01 * d2) * inv[3];
    return {s[0].re * w0 + s[1].re * w1 + s[2].re * w2 + s[3].re * w3,
            s[0].im * w0 + s[1].im * w1 + s[2].im * w2 + s[3].im * w3};
  }

  void pack_green_stencils() {
    const std::size_t n = plan_.size();
    green_nodes_.resize(n + 2);
    for (std::size_t i = 0; i < n; ++i)
      green_nodes_[i] = {plan_.abscissae[i], green_table_.values[i].real(),
                         green_table_.values[i].imag()};
    // sentinels so the flattened forward correction can always read j+1, j+2
    green_nodes_[n] = {std::numeric_limits<double>::infinity(), 0.0, 0.0};
    green_nodes_[n + 1] = {std::numeric_limits<double>::infinity(), 0.0, 0.0};
    green_inv_den_.resize(4 * (n - 3));
    const double* a = plan_.abscissae.data();
    for (std::size_t start = 0; start + 4 <= n; ++start) {
      const double e01 = a[start] - a[start + 1];
      const double e02 = a[start] - a[start + 2];
      const double e03 = a[start] - a[start + 3];
      const double e12 = a[start + 1] - a[start + 2];
      const double e13 = a[start + 1] - a[start + 3];
      const double e23 = a[start + 2] - a[start + 3];
      double* inv = green_inv_den_.data() + 4 * start;
      inv[0] = 1.0 / ((e01 * e02) * e03);
      inv[1] = 1.0 / -((e01 * e12) * e13);
      inv[2] = 1.0 / ((e02 * e12) * e23);
      inv[3] = 1.0 / -((e03 * e13) * e23);
    }
  }

  SamplingPlan plan_;
  KernelTable exp_table_;
  KernelTable green_table_;
  HashIndex hash_;
  double k_;
  int degree_;
  std::vector<PackedNode> green_nodes_;
  std::vector<double> green_inv_den_;
  mutable std::atomic<std::uint64_t> fallbacks_{0};
};

}  // namespace gktab
