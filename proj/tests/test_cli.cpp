#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "hlab/config.hpp"
#include "hlab/errors.hpp"
#include "hlab/run.hpp"

using namespace hlab;
using nlohmann::json;

namespace {

std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("hlab_cli_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json base(const char* kernel, std::size_t n = 1) {
  return {{"kernel", {{"name", kernel}, {"n", n}}}, {"grid", {{"L", 32}, {"N", 4096}}}};
}

// Splits a CSV body into rows of cells.
std::vector<std::vector<std::string>> rows(const std::string& text) {
  std::vector<std::vector<std::string>> out;
  std::stringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) {
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    out.push_back(cells);
  }
  return out;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(HLAB_CLI) + " " + args + " -q > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::filesystem::path write_config(const std::filesystem::path& dir, const json& doc) {
  const auto path = dir / "config.json";
  std::ofstream(path) << doc.dump();
  return path;
}

}  // namespace

TEST(Config, ParsesScalarsAndPerAxisGrids) {
  json doc = base("box", 2);
  doc["grid"] = {{"L", {8, 16}}, {"N", 256}};
  doc["p_list"] = {1, 2.5, "inf"};
  doc["tolerances"] = {{"duality", 1e-4}};
  const auto c = ExperimentConfig::from_json(doc);
  const GridSpec s = c.grid.spec(2);
  EXPECT_EQ(s.half_width[1], 16.0);
  EXPECT_EQ(s.points[0], 256u);
  EXPECT_TRUE(std::isinf(c.p_list[2]));
  EXPECT_EQ(c.tolerances.duality, 1e-4);
  EXPECT_EQ(c.tolerances.fourier, 5e-3);  // two-dimensional default
  EXPECT_EQ(c.grid_for("hilbert").points, c.grid.points);
  EXPECT_EQ(c.grid.coarser().points[0], 128u);
}

TEST(Config, RejectsSchemaViolations) {
  auto bad = [](auto edit) {
    json doc = base("box");
    edit(doc);
    EXPECT_THROW(ExperimentConfig::from_json(doc), ConfigError) << doc.dump();
  };
  bad([](json& d) { d["grid"]["N"] = 1000; });
  bad([](json& d) { d["grid"]["L"] = -1; });
  bad([](json& d) { d["grid"] = {{"L", {1, 2, 3}}, {"N", 64}}; });
  bad([](json& d) { d["p_list"] = {0.5}; });
  bad([](json& d) { d["delta"] = 1.5; });
  bad([](json& d) { d["eps_schedule"] = {0.1, -0.01}; });
  bad([](json& d) { d["colour"] = "red"; });
  bad([](json& d) { d["kernel"]["name"] = "no_such_kernel"; });
  bad([](json& d) { d["kernel"]["n"] = 0; });
  bad([](json& d) { d.erase("grid"); });
  bad([](json& d) { d["tolerances"] = {{"duality", 0}}; });
  bad([](json& d) { d["check_grids"] = {{"everything", {{"L", 1}, {"N", 64}}}}; });
  EXPECT_THROW(ExperimentConfig::load("/nonexistent/config.json"), ConfigError);
}

TEST(Config, HashIsStableAndSensitive) {
  const auto a = ExperimentConfig::from_json(base("box"));
  const auto b = ExperimentConfig::from_json(base("box"));
  json other = base("box");
  other["seed"] = 2;
  EXPECT_EQ(a.hash(), b.hash());
  EXPECT_EQ(a.hash().size(), 16u);
  EXPECT_NE(a.hash(), ExperimentConfig::from_json(other).hash());
}

TEST(Norms, TableValues) {
  const auto dir = scratch("norms");
  json doc = base("box");
  doc["p_list"] = {2};
  auto c = ExperimentConfig::from_json(doc);
  c.outputs = dir / "n1";
  run_report(c, {.norms = true});
  auto t = rows(slurp(c.outputs / "norms.csv"));
  ASSERT_EQ(t.size(), 2u);
  EXPECT_EQ(t[0][3], "moment_1_minus_1_over_p");
  EXPECT_NEAR(std::stod(t[1][4]), 2.0, 1e-9);

  doc = base("box", 2);
  doc["p_list"] = {2};
  c = ExperimentConfig::from_json(doc);
  c.outputs = dir / "n2";
  run_report(c, {.norms = true});
  t = rows(slurp(c.outputs / "norms.csv"));
  EXPECT_NEAR(std::stod(t[1][4]), 4.0, 1e-8);

  c = ExperimentConfig::from_json(base("hardy"));
  c.outputs = dir / "hardy";
  const auto summary = run_report(c, {.norms = true});
  t = rows(slurp(c.outputs / "norms.csv"));
  EXPECT_EQ(t[1][5], "inf");
  EXPECT_TRUE(summary.passed);  // divergence is a settled answer
}

TEST(Report, ZeroKernelHasZeroResiduals) {
  const auto dir = scratch("zero");
  json doc = base("zero");
  doc["p_list"] = {1, 2, "inf"};
  auto c = ExperimentConfig::from_json(doc);
  c.outputs = dir;
  const auto s = run_report(c, {.checks = true});
  EXPECT_TRUE(s.passed);
  EXPECT_GT(s.checks.size(), 10u);
  for (const auto& r : s.checks) EXPECT_EQ(r.residual, 0.0) << r.name;
  const json doc2 = json::parse(slurp(dir / "check_report.json"));
  EXPECT_EQ(doc2["config_hash"], c.hash());
  EXPECT_EQ(doc2["checks"].size(), s.checks.size());
  EXPECT_EQ(doc2["grids"]["grid"]["N"][0], 4096);
  const std::string ts = doc2["timestamp"];
  EXPECT_EQ(ts.size(), 20u);
  EXPECT_EQ(ts[10], 'T');
  EXPECT_EQ(ts.back(), 'Z');
}

TEST(Report, TinyGridFlagsRefinementSensitiveChecks) {
  const auto dir = scratch("tiny");
  json doc = base("box");
  doc["grid"] = {{"L", 8}, {"N", 64}};
  doc["p_list"] = {2};
  auto c = ExperimentConfig::from_json(doc);
  c.outputs = dir;
  const auto s = run_report(c, {.checks = true});
  EXPECT_FALSE(s.passed);
  const auto flagged = s.document["refinement_sensitive"];
  EXPECT_GE(flagged.size(), 2u);
  for (const auto& r : s.checks)
    if (r.context.contains("refinement_sensitive"))
      EXPECT_EQ(r.context["refinement_sensitive"].get<bool>(), !(r.context["coarse_residual"].get<double>() <= r.tolerance));
}

TEST(Report, FailingCheckIsRecordedNotThrown) {
  const auto dir = scratch("broken");
  json doc = base("box");
  doc["check_grids"] = {{"witness", {{"L", 4}, {"N", 2}}}};
  doc["p_list"] = {2};
  doc["refinement_probe"] = false;
  auto c = ExperimentConfig::from_json(doc);
  c.outputs = dir;
  const auto s = run_report(c, {.checks = true});
  EXPECT_TRUE(std::filesystem::exists(dir / "check_report.json"));
  for (const auto& r : s.checks) EXPECT_EQ(r.passed, r.residual <= r.tolerance) << r.name;
}

TEST(Sweep, FilesAreDeterministic) {
  json doc = base("box");
  doc["p_list"] = {2};
  doc["eps_schedule"] = {0.1, 0.01};
  doc["h1_eps_schedule"] = {0.2, 0.1};
  doc["check_grids"] = {{"h1", {{"L", 64}, {"N", 4096}}}};
  auto c = ExperimentConfig::from_json(doc);
  const auto first = scratch("sweep_a");
  c.outputs = first;
  const auto s = run_report(c, {.sweeps = true});
  EXPECT_TRUE(s.passed);
  c.outputs = scratch("sweep_b");
  run_report(c, {.sweeps = true});
  for (const char* f : {"sweep_lp_p2.csv", "sweep_h1.csv"}) {
    const auto a = slurp(first / f);
    EXPECT_FALSE(a.empty()) << f;
    EXPECT_EQ(a, slurp(c.outputs / f)) << f;
  }
  const auto t = rows(slurp(c.outputs / "sweep_lp_p2.csv"));
  EXPECT_EQ(t.back()[0], "0");
  EXPECT_NEAR(std::stod(t.back()[1]), 2.0, 0.02);
}

TEST(Cli, ExitCodes) {
  const auto dir = scratch("exit");
  json doc = base("zero");
  doc["outputs"] = (dir / "zero").string();
  EXPECT_EQ(run_cli("check --config " + write_config(dir, doc).string()), 0);
  EXPECT_EQ(run_cli("norms --config " + write_config(dir, doc).string()), 0);

  doc = base("box");
  doc["eps_schedule"] = json::array();
  doc["outputs"] = (dir / "empty").string();
  EXPECT_EQ(run_cli("sweep --config " + write_config(dir, doc).string()), 2);

  doc = base("box");
  doc["grid"]["N"] = 100;
  EXPECT_EQ(run_cli("check --config " + write_config(dir, doc).string()), 2);
  EXPECT_EQ(run_cli("check --config /nonexistent.json"), 2);
  EXPECT_EQ(run_cli("frobnicate"), 2);

  doc = base("box");
  doc["grid"] = {{"L", 8}, {"N", 64}};
  doc["p_list"] = {2};
  EXPECT_EQ(run_cli("check --threads 1 --config " + write_config(dir, doc).string() + " --out " +
                    (dir / "tiny").string()),
            1);
  EXPECT_TRUE(std::filesystem::exists(dir / "tiny" / "check_report.json"));
}
