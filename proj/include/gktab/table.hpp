#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "gktab/kernel.hpp"
#include "gktab/sampling.hpp"

namespace gktab {

/// Kernel values at the plan's abscissae for one kernel kind and one
/// wavenumber. Values are stored in plan order; the plan itself is held by
/// the caller (tables for both kernels share a single plan).
struct KernelTable {
  KernelKind kind = KernelKind::PlainExp;
  double k = 0.0;
  std::vector<Complex> values;
};

inline KernelTable build_table(const SamplingPlan& plan, KernelKind kind, double k) {
  if (plan.abscissae.size() < 2)
    throw std::invalid_argument("build_table: plan must hold at least two abscissae");
  if (!(k >= 0.0)) throw std::invalid_argument("build_table: k must be >= 0");
  if (kind == KernelKind::GreenOverR && !(plan.r_min() > 0.0))
    throw std::domain_error("build_table: exp(-jkr)/r cannot be tabulated down to r = 0");
  KernelTable table{kind, k, {}};
  table.values.reserve(plan.size());
  for (double r : plan.abscissae) table.values.push_back(eval_analytic(kind, k, r));
  return table;
}

/// Dense array mapping floor((r - r_min)/dr_min) to a bracketing sample
/// index, for constant-time lookup in a non-uniform table. buckets[b] holds
/// the greatest sample index whose abscissa does not exceed the bucket's
/// left edge r_min + b*dr_min.
struct HashIndex {
  double r_min = 0.0;
  double r_max = 0.0;
  double dr_min = 0.0;
  double inv_dr_min = 0.0;  // queries multiply instead of divide
  std::vector<std::uint32_t> buckets;

  /// Bucket holding r; requires r >= r_min.
  std::size_t bucket_of(double r) const {
    const auto b = static_cast<std::size_t>((r - r_min) * inv_dr_min);
    return b < buckets.size() ? b : buckets.size() - 1;
  }
};

inline HashIndex build_hash(const SamplingPlan& plan) {
  if (plan.abscissae.size() < 2)
    throw std::invalid_argument("build_hash: plan must hold at least two abscissae");
  if (plan.abscissae.size() > std::numeric_limits<std::uint32_t>::max())
    throw std::invalid_argument("build_hash: plan exceeds 32-bit sample indexing");
  HashIndex hash;
  hash.r_min = plan.r_min();
  hash.r_max = plan.r_max();
  hash.dr_min = plan.dr_min;
  hash.inv_dr_min = 1.0 / plan.dr_min;
  const auto nb =
      static_cast<std::size_t>(std::ceil((hash.r_max - hash.r_min) / hash.dr_min)) + 1;
  hash.buckets.assign(nb, 0);

  // Pass 1: each sample seeds the first bucket whose left edge it does not
  // exceed (ascending order, so the greatest index wins a shared bucket).
  // Pass 2: remaining buckets inherit from their predecessor, starting at the
  // lower bound of the array. Seeding goes through the same bucket_of map the
  // queries use, which keeps the two consistent under rounding.
  const auto& absc = plan.abscissae;
  for (std::size_t j = 1; j < absc.size(); ++j) {
    auto b = static_cast<std::size_t>((absc[j] - hash.r_min) * hash.inv_dr_min);
    if (hash.r_min + static_cast<double>(b) * hash.dr_min < absc[j]) ++b;
    if (b < nb) hash.buckets[b] = static_cast<std::uint32_t>(j);
  }
  for (std::size_t b = 1; b < nb; ++b)
    hash.buckets[b] = std::max(hash.buckets[b], hash.buckets[b - 1]);
  return hash;
}

/// Bracketing lookup: returns j with abscissae[j] <= r < abscissae[j+1]
/// (r = r_max maps to the penultimate index so an interpolation stencil
/// always fits). One bucket read plus at most one corrective step.
inline std::size_t locate(const HashIndex& hash, const SamplingPlan& plan, double r) {
  if (!(r >= hash.r_min && r <= hash.r_max))
    throw std::out_of_range("locate: r outside the tabulated range");
  const auto& absc = plan.abscissae;
  const std::size_t count = absc.size();
  const std::size_t j = hash.buckets[hash.bucket_of(r)];
  // bracketing correction: a backward bucket-edge rounding guard plus up to
  // two forward steps (the second fires only when rounding packs two samples
  // into one bucket; it implies the first, so the tests sum)
  const auto back = static_cast<std::size_t>(j > 0 && r < absc[j]);
  const auto fwd1 = static_cast<std::size_t>(j + 1 < count && absc[j + 1] <= r);
  const auto fwd2 = static_cast<std::size_t>(j + 2 < count && absc[j + 2] <= r);
  const std::size_t jc = j - back + fwd1 + fwd2;
  const std::size_t last_pair = count - 2;
  return jc < last_pair ? jc : last_pair;
}

}  // namespace gktab
