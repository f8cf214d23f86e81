#pragma once

#include <algorithm>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <thread>
#include <utility>
#include <vector>

#include "gktab/evaluator.hpp"
#include "gktab/kernel.hpp"
#include "gktab/mesh.hpp"
#include "gktab/quadrature.hpp"
#include "gktab/sampling.hpp"

namespace gktab {

/// Dense Galerkin-style matrix of scalar kernel integrals over triangle
/// pairs. Self-pairs are excluded from the benchmark and stay zero.
struct KernelMatrix {
  std::size_t n = 0;
  std::vector<Complex> z;

  explicit KernelMatrix(std::size_t size = 0) : n(size), z(size * size) {}
  Complex& at(std::size_t p, std::size_t q) { return z[p * n + q]; }
  const Complex& at(std::size_t p, std::size_t q) const { return z[p * n + q]; }
};

struct FillReport {
  std::size_t N = 0;
  int m = 0;
  int n = 0;
  std::uint64_t predicted_calls = 0;
  std::uint64_t actual_calls = 0;
  std::uint64_t fallback_calls = 0;
  double wall_time_s = 0.0;
  double max_rel_re = 0.0;  ///< vs the analytic fill; interpolated runs only
  double max_rel_im = 0.0;
  double speedup = 0.0;          ///< analytic time / interpolated time
  double analytic_time_s = 0.0;  ///< populated by bench_compare
  double interp_time_s = 0.0;    ///< fill + table build, populated by bench_compare
  double table_build_s = 0.0;
};

/// Kernel-call budget of a full fill: 3*m*n*N^2.
inline std::uint64_t predicted_calls(std::uint64_t N, std::uint64_t m, std::uint64_t n) {
  const unsigned __int128 wide =
      static_cast<unsigned __int128>(3) * m * n * (static_cast<unsigned __int128>(N) * N);
  if (wide > static_cast<unsigned __int128>(UINT64_MAX))
    throw std::overflow_error("predicted_calls: 3*m*n*N^2 overflows 64 bits");
  return static_cast<std::uint64_t>(wide);
}

/// Direct analytic evaluation, the reference side of every A/B comparison.
struct AnalyticKernel {
  double k = 0.0;
  Complex operator()(KernelKind kind, double r) const { return eval_analytic(kind, k, r); }
  Complex accumulate(KernelKind kind, std::span<const double> radii,
                     std::span<const double> weights) const {
    Complex acc{0.0, 0.0};
    for (std::size_t i = 0; i < radii.size(); ++i)
      acc += eval_analytic(kind, k, radii[i]) * weights[i];
    return acc;
  }
  std::uint64_t fallback_count() const { return 0; }
};

/// Table-driven evaluation through a KernelEvaluator. The Green kernel takes
/// the evaluator's staged-lookup block path; per-point values match the
/// scalar calls.
struct TableKernel {
  const KernelEvaluator* ev = nullptr;
  Complex operator()(KernelKind kind, double r) const { return ev->eval_kernel(kind, r); }
  Complex accumulate(KernelKind kind, std::span<const double> radii,
                     std::span<const double> weights) const {
    if (kind == KernelKind::GreenOverR) return ev->accumulate_green(radii, weights);
    Complex acc{0.0, 0.0};
    for (std::size_t i = 0; i < radii.size(); ++i)
      acc += ev->eval_kernel(kind, radii[i]) * weights[i];
    return acc;
  }
  std::uint64_t fallback_count() const { return ev->fallback_count(); }
};

namespace detail {

/// Quadrature points in coordinate-split layout so the distance staging loop
/// of the fill vectorizes.
struct PointSet {
  std::vector<double> x, y, z, w;

  void push(const Vec3& p, double weight) {
    x.push_back(p.x);
    y.push_back(p.y);
    z.push_back(p.z);
    w.push_back(weight);
  }
};

/// m outer points per triangle, weights scaled by triangle area.
inline PointSet outer_points(const TriangleMesh& mesh, int m) {
  const auto rule = triangle_rule(m);
  PointSet pts;
  for (std::size_t i = 0; i < mesh.triangle_count(); ++i) {
    const auto& tri = mesh.triangles[i];
    const Vec3 a = mesh.vertices[tri[0]];
    const Vec3 b = mesh.vertices[tri[1]];
    const Vec3 c = mesh.vertices[tri[2]];
    const double area = mesh.triangle_area(i);
    for (const auto& q : rule) pts.push(a * q.b0 + b * q.b1 + c * q.b2, q.w * area);
  }
  return pts;
}

/// n Gauss points on each of the three source-triangle edges, weights scaled
/// by edge length (a contour composite over the triangle boundary).
inline PointSet inner_points(const TriangleMesh& mesh, int n) {
  const auto rule = gauss_legendre_unit(n);
  PointSet pts;
  for (const auto& tri : mesh.triangles) {
    for (int e = 0; e < 3; ++e) {
      const Vec3 a = mesh.vertices[tri[static_cast<std::size_t>(e)]];
      const Vec3 b = mesh.vertices[tri[static_cast<std::size_t>((e + 1) % 3)]];
      const double len = distance(a, b);
      for (const auto& g : rule) pts.push(a + (b - a) * g.x, g.w * len);
    }
  }
  return pts;
}

}  // namespace detail

/// Fills the N x N matrix of double quadrature sums of the kernel over all
/// ordered triangle pairs (p, q), p != q. Every (outer, inner) point pair
/// invokes the evaluator exactly once; wall_time_s covers the fill loop only
/// (quadrature-point generation is shared setup and excluded). With
/// threads > 1 the outer-triangle range is partitioned across workers; each
/// entry is computed independently, so results match the single-threaded
/// fill bit for bit.
template <typename Kernel>
std::pair<KernelMatrix, FillReport> fill_matrix(const TriangleMesh& mesh,
                                                const QuadratureSpec& spec, Kernel&& kernel,
                                                KernelKind kind, int threads = 1) {
  spec.validate();
  mesh.validate();
  if (threads < 1) throw std::invalid_argument("fill_matrix: threads must be >= 1");
  const std::size_t N = mesh.triangle_count();
  const auto m = static_cast<std::size_t>(spec.outer_points);
  const auto inner_per_tri = static_cast<std::size_t>(3 * spec.inner_points_per_edge);

  const auto outer = detail::outer_points(mesh, spec.outer_points);
  const auto inner = detail::inner_points(mesh, spec.inner_points_per_edge);

  KernelMatrix matrix(N);
  FillReport report;
  report.N = N;
  report.m = spec.outer_points;
  report.n = spec.inner_points_per_edge;
  report.predicted_calls = predicted_calls(N, static_cast<std::uint64_t>(spec.outer_points),
                                           static_cast<std::uint64_t>(spec.inner_points_per_edge));

  const std::uint64_t fallbacks_before = kernel.fallback_count();
  std::vector<std::uint64_t> calls_per_worker(static_cast<std::size_t>(threads), 0);

  auto fill_rows = [&](std::size_t p_begin, std::size_t p_end, std::uint64_t& calls) {
    // distances and weights for one (p, q) block are staged first so the
    // evaluator sees a dependency-free run of points it can overlap
    const std::size_t block = m * inner_per_tri;
    std::vector<double> block_r(block);
    std::vector<double> block_w(block);
    for (std::size_t p = p_begin; p < p_end; ++p) {
      const std::size_t ob = p * m;
      for (std::size_t q = 0; q < N; ++q) {
        if (p == q) continue;
        const std::size_t ib = q * inner_per_tri;
        const double* ix = inner.x.data() + ib;
        const double* iy = inner.y.data() + ib;
        const double* iz = inner.z.data() + ib;
        const double* iw = inner.w.data() + ib;
        std::size_t idx = 0;
        for (std::size_t o = 0; o < m; ++o) {
          const double ox = outer.x[ob + o];
          const double oy = outer.y[ob + o];
          const double oz = outer.z[ob + o];
          const double ow = outer.w[ob + o];
          for (std::size_t i = 0; i < inner_per_tri; ++i) {
            const double dx = ox - ix[i];
            const double dy = oy - iy[i];
            const double dz = oz - iz[i];
            block_r[idx] = std::sqrt(dx * dx + dy * dy + dz * dz);
            block_w[idx] = ow * iw[i];
            ++idx;
          }
        }
        matrix.at(p, q) = kernel.accumulate(kind, block_r, block_w);
        calls += block;
      }
    }
  };

  const auto start = std::chrono::steady_clock::now();
  if (threads == 1) {
    fill_rows(0, N, calls_per_worker[0]);
  } else {
    std::vector<std::thread> workers;
    workers.reserve(static_cast<std::size_t>(threads));
    const std::size_t chunk = (N + static_cast<std::size_t>(threads) - 1) /
                              static_cast<std::size_t>(threads);
    for (int w = 0; w < threads; ++w) {
      const std::size_t begin = static_cast<std::size_t>(w) * chunk;
      const std::size_t end = std::min(N, begin + chunk);
      if (begin >= end) break;
      workers.emplace_back(fill_rows, begin, end,
                           std::ref(calls_per_worker[static_cast<std::size_t>(w)]));
    }
    for (auto& worker : workers) worker.join();
  }
  const auto stop = std::chrono::steady_clock::now();

  report.wall_time_s = std::chrono::duration<double>(stop - start).count();
  for (std::uint64_t c : calls_per_worker) report.actual_calls += c;
  report.fallback_calls = kernel.fallback_count() - fallbacks_before;
  return {std::move(matrix), report};
}

struct FillErrorStats {
  double max_rel_re = 0.0;
  double max_rel_im = 0.0;
};

/// Elementwise relative error of `test` against `ref`, skipping the excluded
/// diagonal and exactly-zero reference components.
inline FillErrorStats compare_fills(const KernelMatrix& test, const KernelMatrix& ref) {
  if (test.n != ref.n) throw std::invalid_argument("compare_fills: size mismatch");
  FillErrorStats stats;
  for (std::size_t p = 0; p < ref.n; ++p) {
    for (std::size_t q = 0; q < ref.n; ++q) {
      if (p == q) continue;
      const Complex& a = ref.at(p, q);
      const Complex& b = test.at(p, q);
      if (a.real() != 0.0)
        stats.max_rel_re =
            std::max(stats.max_rel_re, std::abs(b.real() - a.real()) / std::abs(a.real()));
      if (a.imag() != 0.0)
        stats.max_rel_im =
            std::max(stats.max_rel_im, std::abs(b.imag() - a.imag()) / std::abs(a.imag()));
    }
  }
  return stats;
}

/// A/B benchmark: analytic fill, then table-driven fill over a plan sized to
/// the mesh (r_max = largest vertex distance + 1% margin), with the table
/// build time charged to the interpolated side. With repeats > 1 each fill
/// runs that many times and the fastest wall time counts: scheduling noise
/// only ever adds time, and the fills are deterministic, so the minimum is
/// the faithful per-side figure.
inline FillReport bench_compare(const TriangleMesh& mesh, const QuadratureSpec& spec,
                                const Medium& medium, SamplingConfig cfg,
                                int lagrange_degree = 3,
                                KernelKind kind = KernelKind::GreenOverR, int threads = 1,
                                int repeats = 1) {
  if (repeats < 1) throw std::invalid_argument("bench_compare: repeats must be >= 1");
  const double k = wavenumber(medium);

  cfg.r_max = max_vertex_distance(mesh) * 1.01;
  const auto build_start = std::chrono::steady_clock::now();
  const KernelEvaluator ev(build_plan(cfg, medium), k, lagrange_degree);
  const auto build_stop = std::chrono::steady_clock::now();

  auto [analytic_matrix, analytic_report] =
      fill_matrix(mesh, spec, AnalyticKernel{k}, kind, threads);
  auto [interp_matrix, report] = fill_matrix(mesh, spec, TableKernel{&ev}, kind, threads);
  // interleaved so frequency drift hits both sides alike
  for (int rep = 1; rep < repeats; ++rep) {
    auto [ma, ra] = fill_matrix(mesh, spec, AnalyticKernel{k}, kind, threads);
    analytic_report.wall_time_s = std::min(analytic_report.wall_time_s, ra.wall_time_s);
    auto [mi, ri] = fill_matrix(mesh, spec, TableKernel{&ev}, kind, threads);
    report.wall_time_s = std::min(report.wall_time_s, ri.wall_time_s);
  }

  const FillErrorStats stats = compare_fills(interp_matrix, analytic_matrix);
  report.max_rel_re = stats.max_rel_re;
  report.max_rel_im = stats.max_rel_im;
  report.table_build_s = std::chrono::duration<double>(build_stop - build_start).count();
  report.analytic_time_s = analytic_report.wall_time_s;
  report.interp_time_s = report.wall_time_s + report.table_build_s;
  report.speedup = report.analytic_time_s / report.interp_time_s;
  return report;
}

}  // namespace gktab
