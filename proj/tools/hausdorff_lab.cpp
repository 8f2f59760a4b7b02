// hausdorff_lab: norm tables, extremal sweeps and identity checks from a JSON config.
#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "hlab/config.hpp"
#include "hlab/errors.hpp"
#include "hlab/parallel.hpp"
#include "hlab/run.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kFailed = 1;
constexpr int kConfigError = 2;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hausdorff operator laboratory"};
  app.require_subcommand(1);
  std::string config_path, out_dir;
  std::size_t threads = 0;
  bool quiet = false;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON experiment config")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "output directory (overrides the config)");
    sub->add_option("--threads", threads, "worker threads (default: HAUSDORFF_LAB_THREADS or all cores)")
        ->check(CLI::PositiveNumber);
    sub->add_flag("-q,--quiet", quiet, "no progress lines on stderr");
  };
  auto* norms = app.add_subcommand("norms", "tabulate the four moment norms per p");
  auto* sweep = app.add_subcommand("sweep", "run the extremal lower-bound sweeps");
  auto* check = app.add_subcommand("check", "run the identity and bound checks");
  for (auto* sub : {norms, sweep, check}) add_common(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    auto config = hlab::ExperimentConfig::load(config_path);
    if (!out_dir.empty()) config.outputs = out_dir;
    if (threads > 0) hlab::set_thread_count(threads);

    hlab::RunParts parts;
    parts.norms = norms->parsed();
    parts.sweeps = sweep->parsed();
    parts.checks = check->parsed();
    const auto summary = hlab::run_report(config, parts, quiet ? nullptr : &std::cerr);
    for (const auto& f : summary.files) std::cout << f.string() << '\n';
    return summary.passed ? kOk : kFailed;
  } catch (const hlab::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailed;
  }
}
