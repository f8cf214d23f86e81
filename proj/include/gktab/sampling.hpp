#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "gktab/kernel.hpp"

namespace gktab {

/// Controls construction of the adaptive sampling plan.
struct SamplingConfig {
  double r_min = 1e-4;                 ///< smallest tabulated radius [m]
  double r_max = 1.0;                  ///< largest tabulated radius [m]
  int samples_per_wavelength = 1000;   ///< base density S; recommended range [1e3, 1e4]
  int refine_interval_divisor = 2;     ///< refined spacing = t / divisor
  double refine_halfwidth_in_t = 2.0;  ///< refinement reaches +/- halfwidth*t around each zero
  double dedup_fraction = 0.5;         ///< minimum kept gap as a fraction of the refined spacing
  bool refine = true;                  ///< false: plain uniform grid, no forced zeros

  void validate() const {
    if (!(std::isfinite(r_min) && std::isfinite(r_max) && 0.0 < r_min && r_min < r_max))
      throw std::invalid_argument("SamplingConfig: need 0 < r_min < r_max, both finite");
    if (samples_per_wavelength < 2)
      throw std::invalid_argument("SamplingConfig: samples_per_wavelength must be >= 2");
    if (refine_interval_divisor < (refine ? 2 : 1))
      throw std::invalid_argument(
          "SamplingConfig: refine_interval_divisor must be >= 2 when refinement is on "
          "(a refined interval no smaller than the base interval cannot keep the plan's "
          "gap bounds)");
    if (!(refine_halfwidth_in_t > 0.0))
      throw std::invalid_argument("SamplingConfig: refine_halfwidth_in_t must be > 0");
    if (!(dedup_fraction > 0.0 && dedup_fraction <= 1.0))
      throw std::invalid_argument("SamplingConfig: dedup_fraction must be in (0, 1]");
    if (refine && refine_halfwidth_in_t * refine_interval_divisor < 1.0)
      throw std::invalid_argument(
          "SamplingConfig: refinement window narrower than one refined interval");
  }
};

/// The ordered set of radii at which the kernels are tabulated.
struct SamplingPlan {
  std::vector<double> abscissae;       ///< strictly increasing; first = r_min, last = r_max
  std::vector<double> zero_locations;  ///< forced kernel-zero radii; every entry is an abscissa
  double t = 0.0;                      ///< coarsest consecutive gap (the base interval in use)
  double dr_min = 0.0;                 ///< smallest consecutive gap

  double r_min() const { return abscissae.front(); }
  double r_max() const { return abscissae.back(); }
  std::size_t size() const { return abscissae.size(); }

  /// Throws unless every structural invariant holds.
  void validate() const {
    if (abscissae.size() < 2)
      throw std::invalid_argument("SamplingPlan: need at least two abscissae");
    double lo = 0.0, hi = 0.0;
    for (std::size_t i = 0; i < abscissae.size(); ++i) {
      if (!std::isfinite(abscissae[i]))
        throw std::invalid_argument("SamplingPlan: non-finite abscissa");
      if (i == 0) continue;
      const double gap = abscissae[i] - abscissae[i - 1];
      if (!(gap > 0.0))
        throw std::invalid_argument("SamplingPlan: abscissae must be strictly increasing");
      if (i == 1) {
        lo = hi = gap;
      } else {
        lo = std::min(lo, gap);
        hi = std::max(hi, gap);
      }
    }
    if (lo != dr_min)
      throw std::invalid_argument("SamplingPlan: dr_min does not match the smallest gap");
    if (hi != t)
      throw std::invalid_argument("SamplingPlan: t does not match the largest gap");
    for (std::size_t i = 0; i < zero_locations.size(); ++i) {
      if (i > 0 && !(zero_locations[i] > zero_locations[i - 1]))
        throw std::invalid_argument("SamplingPlan: zero_locations must be strictly increasing");
      if (!std::binary_search(abscissae.begin(), abscissae.end(), zero_locations[i]))
        throw std::invalid_argument("SamplingPlan: zero location is not an abscissa");
    }
  }
};

/// Builds a plan directly from a list of radii (test scaffolding and custom
/// tables); gap statistics are derived, invariants enforced.
inline SamplingPlan make_plan(std::vector<double> abscissae,
                              std::vector<double> zero_locations = {}) {
  SamplingPlan plan{std::move(abscissae), std::move(zero_locations), 0.0, 0.0};
  if (plan.abscissae.size() < 2)
    throw std::invalid_argument("make_plan: need at least two abscissae");
  plan.dr_min = plan.t = plan.abscissae[1] - plan.abscissae[0];
  for (std::size_t i = 2; i < plan.abscissae.size(); ++i) {
    const double gap = plan.abscissae[i] - plan.abscissae[i - 1];
    plan.dr_min = std::min(plan.dr_min, gap);
    plan.t = std::max(plan.t, gap);
  }
  plan.validate();
  return plan;
}

/// Base sampling interval giving S samples per wavelength in the medium:
/// t = lambda0 / (S * sqrt(eps_r * mu_r)).
///
/// S outside the recommended [1e3, 1e4] density range is legal; a note is
/// written to `warn` when a stream is supplied.
inline double base_interval(const Medium& medium, int samples_per_wavelength,
                            std::ostream* warn = nullptr) {
  medium.validate();
  if (samples_per_wavelength < 2)
    throw std::invalid_argument("base_interval: samples_per_wavelength must be >= 2");
  if (warn && (samples_per_wavelength < 1000 || samples_per_wavelength > 10000))
    *warn << "warning: samples_per_wavelength = " << samples_per_wavelength
          << " is outside the recommended range [1000, 10000]\n";
  return medium.lambda0 /
         (static_cast<double>(samples_per_wavelength) * std::sqrt(medium.eps_r * medium.mu_r));
}

/// All radii in [r_min, r_max] where the real or imaginary part of exp(-jkr)
/// vanishes: r = n*pi/(2k) for integer n >= 1. The 1/r factor of the Green
/// kernel never vanishes, so both kernels share these locations.
inline std::vector<double> zero_crossings(double k, double r_min, double r_max) {
  if (!(k > 0.0)) throw std::invalid_argument("zero_crossings: k must be > 0");
  if (!(0.0 < r_min && r_min < r_max))
    throw std::invalid_argument("zero_crossings: need 0 < r_min < r_max");
  const double quarter_period = std::numbers::pi / (2.0 * k);
  std::vector<double> zeros;
  auto n = static_cast<std::int64_t>(std::floor(r_min / quarter_period));
  if (n < 1) n = 1;
  for (;; ++n) {
    const double z = static_cast<double>(n) * quarter_period;
    if (z > r_max) break;
    if (z >= r_min) zeros.push_back(z);
  }
  return zeros;
}

/// Constructs the adaptive plan: an evenly divided base grid over
/// [r_min, r_max], locally refined grids of spacing t/divisor in a window of
/// +/- halfwidth*t around every kernel zero, the zeros themselves as exact
/// samples, and a dedup sweep that drops any weaker sample closer than
/// dedup_fraction * (t/divisor) to a kept one so dr_min stays bounded below
/// (which in turn bounds the hash-array dimension).
inline SamplingPlan build_plan(const SamplingConfig& cfg, const Medium& medium) {
  cfg.validate();
  const double k = wavenumber(medium);
  const double t_nominal = base_interval(medium, cfg.samples_per_wavelength);
  const double span = cfg.r_max - cfg.r_min;
  if (!(span >= 2.0 * t_nominal))
    throw std::invalid_argument("build_plan: range must cover at least two base intervals");

  // Even division keeps every base gap <= t_nominal and makes r_max an exact
  // grid point, so the final interval cannot degenerate.
  const auto steps = static_cast<std::size_t>(std::ceil(span / t_nominal));
  const double t_eff = span / static_cast<double>(steps);

  if (!cfg.refine) {
    SamplingPlan plan;
    plan.abscissae.reserve(steps + 1);
    plan.abscissae.push_back(cfg.r_min);
    for (std::size_t i = 1; i < steps; ++i)
      plan.abscissae.push_back(cfg.r_min + static_cast<double>(i) * t_eff);
    plan.abscissae.push_back(cfg.r_max);
    plan.dr_min = plan.t = plan.abscissae[1] - plan.abscissae[0];
    for (std::size_t i = 2; i < plan.abscissae.size(); ++i) {
      const double gap = plan.abscissae[i] - plan.abscissae[i - 1];
      plan.dr_min = std::min(plan.dr_min, gap);
      plan.t = std::max(plan.t, gap);
    }
    plan.validate();
    return plan;
  }

  const double refined = t_eff / static_cast<double>(cfg.refine_interval_divisor);
  const double min_gap = cfg.dedup_fraction * refined;
  const int side_steps = static_cast<int>(
      std::floor(cfg.refine_halfwidth_in_t * cfg.refine_interval_divisor + 1e-9));

  // Dedup by priority: endpoints, then forced zeros, then the base grid,
  // then refined samples. A candidate lands only if it clears min_gap to
  // both kept neighbors, so weaker points yield to stronger ones and dr_min
  // stays bounded below. Inserting strong-to-weak (rather than sweeping left
  // to right) keeps the refined samples that must bridge the spots where a
  // zero displaces a base point, which caps every gap at the base interval.
  // The slack tolerates grid arithmetic rounding for candidates sitting
  // exactly at min_gap.
  const double keep_gap =
      min_gap - 8.0 * std::numeric_limits<double>::epsilon() * cfg.r_max;
  std::map<double, bool> kept;  // radius -> is_zero
  auto try_insert = [&](double r, bool is_zero) {
    auto it = kept.lower_bound(r);
    if (it != kept.end()) {
      if (it->first == r) {
        it->second = it->second || is_zero;
        return;
      }
      if (it->first - r < keep_gap) return;
    }
    if (it != kept.begin() && r - std::prev(it)->first < keep_gap) return;
    kept.emplace_hint(it, r, is_zero);
  };

  kept.emplace(cfg.r_min, false);
  kept.emplace(cfg.r_max, false);
  const std::vector<double> zeros = zero_crossings(k, cfg.r_min, cfg.r_max);
  for (double z : zeros) try_insert(z, true);
  for (std::size_t i = 1; i < steps; ++i)
    try_insert(cfg.r_min + static_cast<double>(i) * t_eff, false);
  for (double z : zeros) {
    for (int s = 1; s <= side_steps; ++s) {
      const double off = static_cast<double>(s) * refined;
      if (z - off > cfg.r_min) try_insert(z - off, false);
      if (z + off < cfg.r_max) try_insert(z + off, false);
    }
  }

  SamplingPlan plan;
  plan.abscissae.reserve(kept.size());
  for (const auto& [r, is_zero] : kept) {
    plan.abscissae.push_back(r);
    if (is_zero) plan.zero_locations.push_back(r);
  }
  plan.dr_min = plan.t = plan.abscissae[1] - plan.abscissae[0];
  for (std::size_t i = 2; i < plan.abscissae.size(); ++i) {
    const double gap = plan.abscissae[i] - plan.abscissae[i - 1];
    plan.dr_min = std::min(plan.dr_min, gap);
    plan.t = std::max(plan.t, gap);
  }
  plan.validate();
  return plan;
}

}  // namespace gktab
