#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hlab/config.hpp"
#include "hlab/report.hpp"

namespace hlab {

struct RunParts {
  bool norms = false;
  bool sweeps = false;
  bool checks = false;
};

struct RunSummary {
  bool passed = true;  // every check passed, every sweep and moment converged
  std::vector<CheckReport> checks;
  std::vector<std::string> skipped;  // "name: reason"
  std::vector<std::filesystem::path> files;
  nlohmann::json document;  // the check report, when checks ran
};

// Runs the selected parts and writes into config.outputs:
//   norms.csv, sweep_lp_p<p>.csv, sweep_h1.csv, sweeps.json, check_report.json.
// A check that throws is recorded as failed with the message in its context.
RunSummary run_report(const ExperimentConfig& config, RunParts parts, std::ostream* log = nullptr);

// Current UTC time, e.g. 2026-01-02T03:04:05Z.
std::string iso_timestamp();

}  // namespace hlab
