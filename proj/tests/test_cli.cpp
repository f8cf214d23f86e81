// Drives the installed CLI binary end to end through std::system.
#include <gtest/gtest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "gktab/io.hpp"
#include "gktab/mesh.hpp"

namespace {

struct RunResult {
  int exit_code;
};

class TempDir : public ::testing::Test {
 protected:
  void SetUp() override {
    char tmpl[] = "/tmp/gktab_cli_XXXXXX";
    ASSERT_NE(mkdtemp(tmpl), nullptr);
    dir_ = tmpl;
  }
  void TearDown() override {
    const int rc = std::system(("rm -rf '" + dir_ + "'").c_str());
    (void)rc;
  }

  std::string path(const std::string& name) const { return dir_ + "/" + name; }

  RunResult run(const std::string& args) const {
    const std::string cmd = std::string(GKTAB_CLI_BIN) + " " + args + " >" + path("stdout.txt") +
                            " 2>" + path("stderr.txt");
    const int status = std::system(cmd.c_str());
    return {WEXITSTATUS(status)};
  }

  std::string slurp(const std::string& file) const {
    std::ifstream in(file, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  std::string dir_;
};

using Cli = TempDir;

TEST_F(Cli, NoArgumentsIsUsageError) {
  EXPECT_EQ(run("").exit_code, 2);
  EXPECT_EQ(run("frobnicate").exit_code, 2);
  EXPECT_EQ(run("sweep-error --no-such-flag").exit_code, 2);
}

TEST_F(Cli, HelpExitsCleanly) {
  EXPECT_EQ(run("--help").exit_code, 0);
  EXPECT_EQ(run("bench-fill --help").exit_code, 0);
}

TEST_F(Cli, GenMeshProducesLoadableIcosphere) {
  const auto off = path("sphere.off");
  ASSERT_EQ(run("gen-mesh --sphere-subdiv 1 --radius 0.5 --out " + off).exit_code, 0);
  const auto mesh = gktab::load_off(off);
  EXPECT_EQ(mesh.triangle_count(), 80u);
}

TEST_F(Cli, GenMeshRequiresOutput) {
  EXPECT_EQ(run("gen-mesh --sphere-subdiv 1").exit_code, 2);
}

TEST_F(Cli, RuntimeFailureExitsWithOne) {
  // parses fine, fails in plan construction (range below two base intervals)
  EXPECT_EQ(run("build-table --r-min 0.5 --r-max 0.5005").exit_code, 1);
}

TEST_F(Cli, BuildTableDumpsExpKernel) {
  const auto table_bin = path("exp.gktb");
  ASSERT_EQ(run("build-table --kernel exp --dump-table " + table_bin).exit_code, 0);
  std::ifstream in(table_bin, std::ios::binary);
  const auto dump = gktab::load_table_binary(in);
  EXPECT_EQ(dump.kind, gktab::KernelKind::PlainExp);
  ASSERT_FALSE(dump.values.empty());
  for (std::size_t i = 0; i < dump.values.size(); i += 97)
    EXPECT_NEAR(std::abs(dump.values[i]), 1.0, 1e-14);  // unit modulus of exp(-jkr)
}

TEST_F(Cli, BuildTableDumpsPlanAndTable) {
  const auto plan_csv = path("plan.csv");
  const auto table_bin = path("table.gktb");
  ASSERT_EQ(run("build-table --lambda0 1 --r-min 1e-4 --r-max 1 --dump-plan " + plan_csv +
                " --dump-table " + table_bin)
                .exit_code,
            0);

  std::ifstream plan_in(plan_csv);
  std::string header;
  std::getline(plan_in, header);
  EXPECT_EQ(header, "index,r,is_zero,gap_to_next");
  std::size_t rows = 0;
  for (std::string line; std::getline(plan_in, line);) ++rows;
  EXPECT_GT(rows, 1000u);

  std::ifstream table_in(table_bin, std::ios::binary);
  const auto dump = gktab::load_table_binary(table_in);
  EXPECT_EQ(dump.kind, gktab::KernelKind::GreenOverR);
  EXPECT_EQ(dump.radii.size(), rows);
  EXPECT_EQ(dump.values.size(), rows);
}

TEST_F(Cli, SweepWritesFourRowsAndIsDeterministic) {
  const auto csv = path("sweep.csv");
  ASSERT_EQ(
      run("sweep-error --lambda0 1 --r-min 1e-4 --r-max 1 --probes 2000 --out " + csv).exit_code,
      0);
  std::ifstream in(csv);
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "kernel,method,probes,max_rel_re,max_rel_im,max_abs,worst_r");
  std::vector<std::string> rows;
  for (std::string line; std::getline(in, line);) rows.push_back(line);
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[0].substr(0, 11), "exp,linear,");
  EXPECT_EQ(rows[1].substr(0, 14), "exp,lagrange3,");
  EXPECT_EQ(rows[2].substr(0, 13), "green,linear,");
  EXPECT_EQ(rows[3].substr(0, 16), "green,lagrange3,");

  const std::string first = slurp(csv);
  ASSERT_EQ(
      run("sweep-error --lambda0 1 --r-min 1e-4 --r-max 1 --probes 2000 --out " + csv).exit_code,
      0);
  EXPECT_EQ(first, slurp(csv));
}

TEST_F(Cli, RefinementFlagImprovesSweepAccuracy) {
  // 1e4 probes over the default [1e-4, 1] range: the probe grid lands on the
  // kernel zeros, where the unrefined table's relative error blows up
  const auto on_csv = path("on.csv");
  const auto off_csv = path("off.csv");
  ASSERT_EQ(run("sweep-error --probes 10000 --refine on --out " + on_csv).exit_code, 0);
  ASSERT_EQ(run("sweep-error --probes 10000 --refine off --out " + off_csv).exit_code, 0);

  auto parse_max_rel = [&](const std::string& file) {
    std::ifstream in(file);
    std::string line;
    std::getline(in, line);  // header
    std::vector<std::array<double, 2>> vals;
    while (std::getline(in, line)) {
      std::stringstream ss(line);
      std::string field;
      std::array<double, 2> v{};
      for (int col = 0; std::getline(ss, field, ','); ++col) {
        if (col == 3) v[0] = std::stod(field);
        if (col == 4) v[1] = std::stod(field);
      }
      vals.push_back(v);
    }
    return vals;
  };
  const auto on = parse_max_rel(on_csv);
  const auto off = parse_max_rel(off_csv);
  ASSERT_EQ(on.size(), 4u);
  ASSERT_EQ(off.size(), 4u);
  for (std::size_t row = 0; row < 4; ++row) {
    EXPECT_LE(on[row][0], 0.1 * off[row][0]) << "row " << row;
    EXPECT_LE(on[row][1], 0.1 * off[row][1]) << "row " << row;
  }
}

TEST_F(Cli, BenchFillReportsExactCallCount) {
  const auto csv = path("bench.csv");
  ASSERT_EQ(run("bench-fill --sphere-subdiv 0 --outer-m 4 --inner-n 3 --out " + csv).exit_code,
            0);
  std::ifstream in(csv);
  std::string header, row;
  std::getline(in, header);
  EXPECT_EQ(header,
            "N,m,n,predicted_calls,actual_calls,fallback_calls,analytic_s,interp_s,speedup,"
            "max_rel_re,max_rel_im");
  ASSERT_TRUE(static_cast<bool>(std::getline(in, row)));
  // N=20, m=4, n=3: 3*4*3*20*19 actual vs 3*4*3*400 predicted
  EXPECT_EQ(row.substr(0, 21), "20,4,3,14400,13680,0,");
}

TEST_F(Cli, BenchFillRejectsConflictingMeshSources) {
  const auto off = path("sphere.off");
  ASSERT_EQ(run("gen-mesh --sphere-subdiv 0 --out " + off).exit_code, 0);
  EXPECT_EQ(run("bench-fill --mesh " + off + " --sphere-subdiv 1").exit_code, 2);
  EXPECT_EQ(run("bench-fill --mesh " + path("missing.off")).exit_code, 2);
}

TEST_F(Cli, RefinementShapeFlags) {
  const auto csv = path("sweep.csv");
  ASSERT_EQ(run("sweep-error --probes 500 --refine-divisor 4 --refine-halfwidth 3 --out " + csv)
                .exit_code,
            0);
  std::ifstream in(csv);
  std::string header;
  std::getline(in, header);
  std::size_t rows = 0;
  for (std::string line; std::getline(in, line);) ++rows;
  EXPECT_EQ(rows, 4u);
  // divisor below 2 with refinement on cannot hold the plan's gap bounds
  EXPECT_EQ(run("sweep-error --probes 500 --refine-divisor 1").exit_code, 1);
  EXPECT_EQ(run("sweep-error --probes 500 --refine-divisor 1 --refine off --out " + csv)
                .exit_code,
            0);
  // non-default stencil degree flows through to the lagrange rows
  ASSERT_EQ(run("sweep-error --probes 500 --lagrange-degree 2 --out " + csv).exit_code, 0);
  std::ifstream in2(csv);
  std::string text((std::istreambuf_iterator<char>(in2)), std::istreambuf_iterator<char>());
  EXPECT_NE(text.find("exp,lagrange2,"), std::string::npos);
}

TEST_F(Cli, BenchFillLoadsMeshFile) {
  const auto off = path("sphere.off");
  const auto csv = path("bench.csv");
  ASSERT_EQ(run("gen-mesh --sphere-subdiv 0 --out " + off).exit_code, 0);
  ASSERT_EQ(
      run("bench-fill --mesh " + off + " --outer-m 1 --inner-n 1 --out " + csv).exit_code, 0);
  std::ifstream in(csv);
  std::string header, row;
  std::getline(in, header);
  ASSERT_TRUE(static_cast<bool>(std::getline(in, row)));
  EXPECT_EQ(row.substr(0, 7), "20,1,1,");
}

}  // namespace
