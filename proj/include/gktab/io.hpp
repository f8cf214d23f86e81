#pragma once

#include <bit>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "gktab/bounds.hpp"
#include "gktab/kernel.hpp"
#include "gktab/matfill.hpp"
#include "gktab/sampling.hpp"
#include "gktab/table.hpp"

namespace gktab {

namespace detail {

/// %.17g rendering: round-trippable doubles, stable across runs.
inline std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline void put_u32(std::ostream& out, std::uint32_t v) {
  char bytes[4];
  for (int i = 0; i < 4; ++i) bytes[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(bytes, 4);
}

inline void put_f64(std::ostream& out, double v) {
  const auto bits = std::bit_cast<std::uint64_t>(v);
  char bytes[8];
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>((bits >> (8 * i)) & 0xff);
  out.write(bytes, 8);
}

inline std::uint32_t get_u32(std::istream& in) {
  unsigned char bytes[4];
  in.read(reinterpret_cast<char*>(bytes), 4);
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes[i]) << (8 * i);
  return v;
}

inline double get_f64(std::istream& in) {
  unsigned char bytes[8];
  in.read(reinterpret_cast<char*>(bytes), 8);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
  return std::bit_cast<double>(v);
}

}  // namespace detail

/// Plan dump: `index,r,is_zero,gap_to_next`, radii at 17 significant digits.
/// The final row has no successor and reports a zero gap.
inline void dump_plan_csv(const SamplingPlan& plan, std::ostream& out) {
  out << "index,r,is_zero,gap_to_next\n";
  std::size_t zi = 0;
  for (std::size_t i = 0; i < plan.abscissae.size(); ++i) {
    const double r = plan.abscissae[i];
    bool is_zero = false;
    while (zi < plan.zero_locations.size() && plan.zero_locations[zi] < r) ++zi;
    if (zi < plan.zero_locations.size() && plan.zero_locations[zi] == r) is_zero = true;
    const double gap = i + 1 < plan.abscissae.size() ? plan.abscissae[i + 1] - r : 0.0;
    out << i << ',' << detail::format_g17(r) << ',' << (is_zero ? 1 : 0) << ','
        << detail::format_g17(gap) << '\n';
  }
}

inline constexpr std::uint32_t kTableDumpVersion = 1;

/// Binary table dump, little-endian: magic "GKTB", u32 version, u32 count,
/// f64 k, u8 kind, then count records of (f64 r, f64 re, f64 im).
inline void dump_table_binary(const KernelTable& table, const SamplingPlan& plan,
                              std::ostream& out) {
  if (table.values.size() != plan.abscissae.size())
    throw std::invalid_argument("dump_table_binary: table/plan size mismatch");
  out.write("GKTB", 4);
  detail::put_u32(out, kTableDumpVersion);
  detail::put_u32(out, static_cast<std::uint32_t>(table.values.size()));
  detail::put_f64(out, table.k);
  const char kind_byte = static_cast<char>(table.kind);
  out.write(&kind_byte, 1);
  for (std::size_t i = 0; i < table.values.size(); ++i) {
    detail::put_f64(out, plan.abscissae[i]);
    detail::put_f64(out, table.values[i].real());
    detail::put_f64(out, table.values[i].imag());
  }
  if (!out) throw std::runtime_error("dump_table_binary: write failed");
}

struct TableDump {
  KernelKind kind = KernelKind::PlainExp;
  double k = 0.0;
  std::vector<double> radii;
  std::vector<Complex> values;
};

inline TableDump load_table_binary(std::istream& in) {
  char magic[4];
  in.read(magic, 4);
  if (!in || std::string(magic, 4) != "GKTB")
    throw std::runtime_error("load_table_binary: bad magic");
  const std::uint32_t version = detail::get_u32(in);
  if (version != kTableDumpVersion)
    throw std::runtime_error("load_table_binary: unsupported version " +
                             std::to_string(version));
  const std::uint32_t count = detail::get_u32(in);
  TableDump dump;
  dump.k = detail::get_f64(in);
  char kind_byte = 0;
  in.read(&kind_byte, 1);
  if (kind_byte != 0 && kind_byte != 1)
    throw std::runtime_error("load_table_binary: bad kernel kind byte");
  dump.kind = static_cast<KernelKind>(kind_byte);
  dump.radii.reserve(count);
  dump.values.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    dump.radii.push_back(detail::get_f64(in));
    const double re = detail::get_f64(in);
    const double im = detail::get_f64(in);
    dump.values.emplace_back(re, im);
  }
  if (!in) throw std::runtime_error("load_table_binary: truncated stream");
  return dump;
}

inline void write_sweep_csv_header(std::ostream& out) {
  out << "kernel,method,probes,max_rel_re,max_rel_im,max_abs,worst_r\n";
}

inline void write_sweep_csv_row(std::ostream& out, KernelKind kind, InterpMethod method,
                                int lagrange_degree, const ErrorSweepReport& rep) {
  out << kernel_name(kind) << ',' << method_name(method);
  if (method == InterpMethod::Lagrange) out << lagrange_degree;
  out << ',' << rep.probe_count << ',' << detail::format_g17(rep.max_rel_re) << ','
      << detail::format_g17(rep.max_rel_im) << ',' << detail::format_g17(rep.max_abs) << ','
      << detail::format_g17(rep.worst_r) << '\n';
}

/// Fill-benchmark report row (single-row CSV with header).
inline void write_bench_csv(std::ostream& out, const FillReport& rep) {
  out << "N,m,n,predicted_calls,actual_calls,fallback_calls,analytic_s,interp_s,speedup,"
         "max_rel_re,max_rel_im\n";
  out << rep.N << ',' << rep.m << ',' << rep.n << ',' << rep.predicted_calls << ','
      << rep.actual_calls << ',' << rep.fallback_calls << ','
      << detail::format_g17(rep.analytic_time_s) << ',' << detail::format_g17(rep.interp_time_s)
      << ',' << detail::format_g17(rep.speedup) << ',' << detail::format_g17(rep.max_rel_re)
      << ',' << detail::format_g17(rep.max_rel_im) << '\n';
}

}  // namespace gktab
