// Command-line front end: table construction, accuracy sweeps, and the
// matrix-fill benchmark, all emitting CSV for downstream tooling.
//
// Exit codes: 0 success, 1 runtime failure, 2 usage error.

#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "gktab/gktab.hpp"

namespace {

using namespace gktab;

struct CommonOptions {
  double lambda0 = 1.0;
  double eps_r = 1.0;
  double mu_r = 1.0;
  int samples_per_wavelength = 1000;
  double r_min = 1e-4;
  double r_max = 1.0;
  int lagrange_degree = 3;
  std::string refine = "on";
  double refine_halfwidth = 2.0;
  int refine_divisor = 2;
  CLI::Option* r_min_opt = nullptr;

  void add_to(CLI::App* cmd, bool with_r_max) {
    cmd->add_option("--lambda0", lambda0, "free-space wavelength [m]")
        ->capture_default_str();
    cmd->add_option("--eps-r", eps_r, "relative permittivity")->capture_default_str();
    cmd->add_option("--mu-r", mu_r, "relative permeability")->capture_default_str();
    cmd->add_option("--samples-per-wavelength", samples_per_wavelength,
                    "base sampling density S")
        ->capture_default_str();
    r_min_opt = cmd->add_option("--r-min", r_min,
                                "smallest tabulated radius [m] (default 1e-4 * lambda0)");
    if (with_r_max)
      cmd->add_option("--r-max", r_max, "largest tabulated radius [m]")->capture_default_str();
    cmd->add_option("--lagrange-degree", lagrange_degree, "Lagrange stencil degree")
        ->capture_default_str();
    cmd->add_option("--refine", refine, "local refinement near kernel zeros")
        ->check(CLI::IsMember({"on", "off"}))
        ->capture_default_str();
    cmd->add_option("--refine-halfwidth", refine_halfwidth,
                    "refinement window half-width in base intervals")
        ->capture_default_str();
    cmd->add_option("--refine-divisor", refine_divisor,
                    "refined spacing = base interval / divisor")
        ->capture_default_str();
  }

  Medium medium() const { return {lambda0, eps_r, mu_r}; }

  SamplingConfig sampling() const {
    SamplingConfig cfg;
    cfg.r_min = r_min_opt != nullptr && r_min_opt->count() > 0 ? r_min : 1e-4 * lambda0;
    cfg.r_max = r_max;
    cfg.samples_per_wavelength = samples_per_wavelength;
    cfg.refine_interval_divisor = refine_divisor;
    cfg.refine_halfwidth_in_t = refine_halfwidth;
    cfg.refine = refine == "on";
    return cfg;
  }
};

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file '" + path + "'");
  return out;
}

int run_build_table(const CommonOptions& opts, const std::string& kernel,
                    const std::string& plan_path, const std::string& table_path) {
  const Medium medium = opts.medium();
  base_interval(medium, opts.samples_per_wavelength, &std::cerr);
  const SamplingConfig cfg = opts.sampling();
  const SamplingPlan plan = build_plan(cfg, medium);
  const double k = wavenumber(medium);
  const KernelKind kind = kernel == "exp" ? KernelKind::PlainExp : KernelKind::GreenOverR;
  const KernelTable table = build_table(plan, kind, k);
  const HashIndex hash = build_hash(plan);

  if (!plan_path.empty()) {
    auto out = open_output(plan_path);
    dump_plan_csv(plan, out);
  }
  if (!table_path.empty()) {
    auto out = open_output(table_path);
    dump_table_binary(table, plan, out);
  }

  std::cout << "k = " << k << " 1/m over [" << plan.r_min() << ", " << plan.r_max() << "] m\n"
            << "samples: " << plan.size() << " (" << plan.zero_locations.size()
            << " forced zeros), base interval " << plan.t << " m, dr_min " << plan.dr_min
            << " m\n"
            << "hash buckets: " << hash.buckets.size() << " ("
            << hash.buckets.size() * sizeof(std::uint32_t) << " bytes)\n"
            << "table: " << kernel_name(kind) << ", " << table.values.size() << " entries\n";
  return 0;
}

int run_sweep(const CommonOptions& opts, std::size_t probes, const std::string& out_path) {
  const Medium medium = opts.medium();
  base_interval(medium, opts.samples_per_wavelength, &std::cerr);
  const KernelEvaluator ev(build_plan(opts.sampling(), medium), wavenumber(medium),
                           opts.lagrange_degree);

  auto out = open_output(out_path);
  write_sweep_csv_header(out);
  std::cout << "sweep: " << probes << " probes over [" << ev.plan().r_min() << ", "
            << ev.plan().r_max() << "] m, refine " << opts.refine << "\n";
  for (KernelKind kind : {KernelKind::PlainExp, KernelKind::GreenOverR}) {
    for (InterpMethod method : {InterpMethod::Linear, InterpMethod::Lagrange}) {
      const auto rep = error_sweep(ev, kind, method, probes);
      write_sweep_csv_row(out, kind, method, ev.lagrange_degree(), rep);
      std::cout << "  " << kernel_name(kind) << '/' << method_name(method)
                << ": max_rel_re " << rep.max_rel_re << ", max_rel_im " << rep.max_rel_im
                << ", max_abs " << rep.max_abs << ", worst r " << rep.worst_r << " m\n";
    }
  }
  std::cout << "wrote " << out_path << "\n";
  return 0;
}

int run_bench(const CommonOptions& opts, const std::string& mesh_path, int sphere_subdiv,
              double radius, int outer_m, int inner_n, int threads, int repeats,
              const std::string& out_path) {
  TriangleMesh mesh;
  if (!mesh_path.empty()) {
    if (!std::filesystem::exists(mesh_path)) {
      std::cerr << "error: mesh file '" << mesh_path << "' does not exist\n";
      return 2;
    }
    mesh = load_off(mesh_path);
  } else {
    mesh = generate_sphere_mesh(radius, sphere_subdiv);
  }
  const Medium medium = opts.medium();
  base_interval(medium, opts.samples_per_wavelength, &std::cerr);
  const QuadratureSpec spec{outer_m, inner_n};
  spec.validate();

  const FillReport report =
      bench_compare(mesh, spec, medium, opts.sampling(), opts.lagrange_degree,
                    KernelKind::GreenOverR, threads, repeats);

  auto out = open_output(out_path);
  write_bench_csv(out, report);

  std::cout << "N = " << report.N << " triangles, m = " << report.m << ", n = " << report.n
            << ", threads = " << threads << "\n"
            << "calls: " << report.actual_calls << " actual / " << report.predicted_calls
            << " predicted, " << report.fallback_calls << " analytic fallbacks\n"
            << "analytic fill: " << report.analytic_time_s << " s\n"
            << "interpolated fill: " << report.interp_time_s << " s (table build "
            << report.table_build_s << " s)\n"
            << "speedup: " << report.speedup << "x\n"
            << "max relative error vs analytic: re " << report.max_rel_re << ", im "
            << report.max_rel_im << "\n"
            << "wrote " << out_path << "\n";
  return 0;
}

int run_gen_mesh(int sphere_subdiv, double radius, const std::string& out_path) {
  const TriangleMesh mesh = generate_sphere_mesh(radius, sphere_subdiv);
  save_off(mesh, out_path);
  std::cout << "wrote " << out_path << ": " << mesh.triangle_count() << " triangles, "
            << mesh.vertices.size() << " vertices, radius " << radius << " m\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"adaptive interpolation tables for exp(-jkr) and exp(-jkr)/r kernels"};
  app.require_subcommand(1);

  CommonOptions table_opts;
  std::string table_kernel = "green";
  std::string dump_plan_path;
  std::string dump_table_path;
  auto* build_cmd = app.add_subcommand("build-table", "construct a plan, table, and hash index");
  table_opts.add_to(build_cmd, true);
  build_cmd->add_option("--kernel", table_kernel, "which kernel the table dump carries")
      ->check(CLI::IsMember({"exp", "green"}))
      ->capture_default_str();
  build_cmd->add_option("--dump-plan", dump_plan_path, "write the plan as CSV");
  build_cmd->add_option("--dump-table", dump_table_path, "write the table in binary form");

  CommonOptions sweep_opts;
  std::size_t probes = 10000;
  std::string sweep_out = "sweep.csv";
  auto* sweep_cmd =
      app.add_subcommand("sweep-error", "interpolation accuracy sweep against the analytic kernel");
  sweep_opts.add_to(sweep_cmd, true);
  sweep_cmd->add_option("--probes", probes, "number of uniform probes")->capture_default_str();
  sweep_cmd->add_option("--out", sweep_out, "report CSV path")->capture_default_str();

  CommonOptions bench_opts;
  std::string mesh_path;
  int sphere_subdiv = 2;
  double bench_radius = 0.5;
  int outer_m = 4;
  int inner_n = 3;
  int threads = 1;
  int bench_repeats = 1;
  std::string bench_out = "bench.csv";
  auto* bench_cmd =
      app.add_subcommand("bench-fill", "A/B matrix-fill benchmark: analytic vs interpolated");
  bench_opts.add_to(bench_cmd, false);
  auto* mesh_opt = bench_cmd->add_option("--mesh", mesh_path, "OFF mesh file");
  auto* subdiv_opt =
      bench_cmd->add_option("--sphere-subdiv", sphere_subdiv, "icosphere subdivision level")
          ->capture_default_str();
  mesh_opt->excludes(subdiv_opt);
  subdiv_opt->excludes(mesh_opt);
  bench_cmd->add_option("--radius", bench_radius, "sphere radius [m]")->capture_default_str();
  bench_cmd->add_option("--outer-m", outer_m, "outer triangle quadrature points")
      ->capture_default_str();
  bench_cmd->add_option("--inner-n", inner_n, "inner Gauss points per source edge")
      ->capture_default_str();
  bench_cmd->add_option("--threads", threads, "fill workers")->capture_default_str();
  bench_cmd->add_option("--repeats", bench_repeats,
                        "fill repetitions per side; fastest wall time is kept")
      ->capture_default_str();
  bench_cmd->add_option("--out", bench_out, "report CSV path")->capture_default_str();

  int gen_subdiv = 2;
  double gen_radius = 0.5;
  std::string gen_out;
  auto* gen_cmd = app.add_subcommand("gen-mesh", "write an icosphere mesh in OFF format");
  gen_cmd->add_option("--sphere-subdiv", gen_subdiv, "subdivision level")->capture_default_str();
  gen_cmd->add_option("--radius", gen_radius, "sphere radius [m]")->capture_default_str();
  gen_cmd->add_option("--out", gen_out, "output OFF path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (build_cmd->parsed())
      return run_build_table(table_opts, table_kernel, dump_plan_path, dump_table_path);
    if (sweep_cmd->parsed()) return run_sweep(sweep_opts, probes, sweep_out);
    if (bench_cmd->parsed())
      return run_bench(bench_opts, mesh_path, sphere_subdiv, bench_radius, outer_m, inner_n,
                       threads, bench_repeats, bench_out);
    if (gen_cmd->parsed()) return run_gen_mesh(gen_subdiv, gen_radius, gen_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
