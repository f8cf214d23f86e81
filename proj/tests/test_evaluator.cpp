#include "gktab/evaluator.hpp"

#include <gtest/gtest.h>

#include <numbers>
#include <random>
#include <thread>

#include "gktab/bounds.hpp"
#include "oracles.hpp"

using namespace gktab;

namespace {

constexpr double kPi = std::numbers::pi;
const Medium kVacuum{1.0, 1.0, 1.0};
constexpr double kTwoPi = 2.0 * kPi;

KernelEvaluator reference_evaluator(int degree = 3) {
  return {build_plan({}, kVacuum), kTwoPi, degree};
}

TEST(Evaluator, ReproducesNodesExactly) {
  const auto ev = reference_evaluator();
  for (std::size_t j = 0; j < ev.plan().size(); ++j) {
    const double r = ev.plan().abscissae[j];
    EXPECT_EQ(ev.eval_exp(r), ev.exp_table().values[j]);
    EXPECT_EQ(ev.eval_green(r), ev.green_table().values[j]);
  }
}

TEST(Evaluator, ConstantTableInterpolatesToConstant) {
  const auto plan = make_plan({0.1, 0.35, 0.6, 0.85, 1.1});
  const KernelEvaluator ev(plan, 0.0, 3);
  for (double r : {0.1, 0.17, 0.42, 0.555, 0.99, 1.1}) {
    const Complex v = ev.eval_exp(r);
    EXPECT_NEAR(v.real(), 1.0, 1e-14);
    EXPECT_EQ(v.imag(), 0.0);
  }
}

TEST(Evaluator, LinearErrorWithinAnalyticBound) {
  const auto ev = reference_evaluator();
  const double r = 0.1003;  // mid-interval, away from zeros
  const Complex approx = ev.eval_exp(r);
  const Complex exact = eval_analytic(KernelKind::PlainExp, kTwoPi, r);
  const double bound = pointwise_bound(ev, KernelKind::PlainExp, InterpMethod::Linear, r);
  EXPECT_LE(std::abs(approx - exact), bound);
  EXPECT_GT(bound, 0.0);
}

TEST(Evaluator, LagrangeSweepDominatedByBound) {
  const auto ev = reference_evaluator();
  for (int i = 0; i < 20000; ++i) {
    double r = ev.plan().r_min() +
               static_cast<double>(i) * (ev.plan().r_max() - ev.plan().r_min()) / 19999.0;
    r = std::min(r, ev.plan().r_max());
    const Complex approx = ev.eval_green(r);
    const Complex exact = eval_analytic(KernelKind::GreenOverR, kTwoPi, r);
    const double bound = pointwise_bound(ev, KernelKind::GreenOverR, InterpMethod::Lagrange, r);
    ASSERT_LE(std::abs(approx - exact), bound) << "r = " << r;  // modulus
    ASSERT_LE(std::abs(approx.real() - exact.real()), bound) << "r = " << r;
    ASSERT_LE(std::abs(approx.imag() - exact.imag()), bound) << "r = " << r;
  }
}

TEST(Evaluator, DegreeOneLagrangeIsBitCompatibleWithLinear) {
  const auto ev = reference_evaluator(1);
  std::mt19937_64 rng(31337);
  std::uniform_real_distribution<double> ur(ev.plan().r_min(), ev.plan().r_max());
  for (int i = 0; i < 50000; ++i) {
    const double r = ur(rng);
    const Complex lin = interp_linear(ev.exp_table(), ev.plan(), ev.hash(), r);
    const Complex lag = interp_lagrange(ev.exp_table(), ev.plan(), ev.hash(), 1, r);
    ASSERT_EQ(lin, lag) << "r = " << r;
  }
}

TEST(Evaluator, FallbackBelowRminIsAnalyticAndCounted) {
  const auto ev = reference_evaluator();
  const double r = ev.plan().r_min() / 2.0;
  EXPECT_EQ(ev.fallback_count(), 0u);
  EXPECT_EQ(ev.eval_kernel(KernelKind::GreenOverR, r),
            eval_analytic(KernelKind::GreenOverR, kTwoPi, r));
  EXPECT_EQ(ev.fallback_count(), 1u);
  EXPECT_EQ(ev.eval_kernel(KernelKind::PlainExp, r),
            eval_analytic(KernelKind::PlainExp, kTwoPi, r));
  EXPECT_EQ(ev.fallback_count(), 2u);
}

TEST(Evaluator, BoundaryNodeUsesInterpolatedPath) {
  const auto ev = reference_evaluator();
  const double r = ev.plan().r_min();
  EXPECT_EQ(ev.eval_kernel(KernelKind::PlainExp, r), ev.exp_table().values[0]);
  EXPECT_EQ(ev.fallback_count(), 0u);
}

TEST(Evaluator, DomainErrors) {
  const auto ev = reference_evaluator();
  EXPECT_THROW(ev.eval_kernel(KernelKind::GreenOverR, 0.0), std::domain_error);
  EXPECT_THROW(ev.eval_kernel(KernelKind::PlainExp, -1.0), std::invalid_argument);
  EXPECT_THROW(ev.eval_kernel(KernelKind::GreenOverR, 1.5), std::out_of_range);
  EXPECT_EQ(ev.eval_kernel(KernelKind::PlainExp, 0.0), Complex(1.0, 0.0));
}

TEST(Evaluator, BatchMatchesScalarPath) {
  const auto ev = reference_evaluator();
  EXPECT_TRUE(ev.eval_batch(KernelKind::PlainExp, {}).empty());

  std::vector<double> radii{0.37};
  auto single = ev.eval_batch(KernelKind::GreenOverR, radii);
  ASSERT_EQ(single.size(), 1u);
  EXPECT_EQ(single[0], ev.eval_kernel(KernelKind::GreenOverR, 0.37));

  std::mt19937_64 rng(4242);
  std::uniform_real_distribution<double> ur(ev.plan().r_min() / 10.0, ev.plan().r_max());
  radii.clear();
  for (int i = 0; i < 1000000; ++i) radii.push_back(ur(rng));  // straddles r_min
  const auto batch = ev.eval_batch(KernelKind::GreenOverR, radii);
  ASSERT_EQ(batch.size(), radii.size());
  for (std::size_t i = 0; i < radii.size(); ++i)
    ASSERT_EQ(batch[i], ev.eval_kernel(KernelKind::GreenOverR, radii[i]));
}

TEST(Evaluator, BatchReportsFailingIndex) {
  const auto ev = reference_evaluator();
  const std::vector<double> radii{0.2, 0.3, -1.0, 0.4};
  try {
    ev.eval_batch(KernelKind::PlainExp, radii);
    FAIL() << "expected an exception";
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("[2]"), std::string::npos);
  }
}

TEST(Evaluator, DeterministicEvaluation) {
  const auto ev = reference_evaluator();
  for (double r : {0.123456, 0.5001, 0.99999}) {
    EXPECT_EQ(ev.eval_exp(r), ev.eval_exp(r));
    EXPECT_EQ(ev.eval_green(r), ev.eval_green(r));
  }
}

TEST(Evaluator, FallbackCounterExactUnderConcurrency) {
  const auto ev = reference_evaluator();
  constexpr int kThreads = 8;
  constexpr int kCallsPerThread = 2000;
  std::vector<std::thread> workers;
  for (int t = 0; t < kThreads; ++t)
    workers.emplace_back([&ev] {
      for (int i = 0; i < kCallsPerThread; ++i)
        ev.eval_kernel(KernelKind::GreenOverR, 5e-5);
    });
  for (auto& w : workers) w.join();
  EXPECT_EQ(ev.fallback_count(), static_cast<std::uint64_t>(kThreads) * kCallsPerThread);
}

TEST(Evaluator, RejectsUndersizedTable) {
  const auto plan = make_plan({0.1, 0.2, 0.3});
  EXPECT_THROW(KernelEvaluator(plan, 1.0, 3), std::invalid_argument);
  EXPECT_NO_THROW(KernelEvaluator(plan, 1.0, 2));
}

TEST(Evaluator, GenericDegreesStayWithinBounds) {
  // Degrees other than the unrolled default take the generic product formula.
  // A coarse unrefined grid keeps the degree-4 bound well above the ~1e-15
  // floating-point measurement floor over the whole range.
  SamplingConfig cfg;
  cfg.r_min = 0.1;
  cfg.r_max = 1.0;
  cfg.samples_per_wavelength = 500;
  cfg.refine = false;
  for (int degree : {2, 4}) {
    const KernelEvaluator ev(build_plan(cfg, kVacuum), kTwoPi, degree);
    for (int i = 0; i < 4000; ++i) {
      double r = ev.plan().r_min() +
                 static_cast<double>(i) * (ev.plan().r_max() - ev.plan().r_min()) / 3999.0;
      r = std::min(r, ev.plan().r_max());
      const Complex approx = ev.eval_green(r);
      const Complex exact = eval_analytic(KernelKind::GreenOverR, kTwoPi, r);
      const double bound =
          pointwise_bound(ev, KernelKind::GreenOverR, InterpMethod::Lagrange, r);
      ASSERT_LE(std::abs(approx - exact), bound) << "degree " << degree << " r = " << r;
    }
    for (std::size_t j = 0; j < ev.plan().size(); j += 37)
      EXPECT_EQ(ev.eval_green(ev.plan().abscissae[j]), ev.green_table().values[j]);
  }
}

TEST(Evaluator, StencilClampedAtTableEnds) {
  // probes in the first and last intervals still interpolate within range
  const auto plan = make_plan({0.1, 0.2, 0.3, 0.4, 0.5});
  const KernelEvaluator ev(plan, kTwoPi, 3);
  for (double r : {0.1, 0.105, 0.45, 0.5}) {
    const Complex v = ev.eval_green(r);
    EXPECT_TRUE(std::isfinite(v.real()) && std::isfinite(v.imag()));
  }
  // degree-3 accuracy sanity at the clamped ends
  const Complex approx = ev.eval_green(0.45);
  const Complex exact = eval_analytic(KernelKind::GreenOverR, kTwoPi, 0.45);
  EXPECT_LE(std::abs(approx - exact),
            pointwise_bound(ev, KernelKind::GreenOverR, InterpMethod::Lagrange, 0.45));
}

}  // namespace
