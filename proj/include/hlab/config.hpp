#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hlab/gridfn.hpp"
#include "hlab/kernel.hpp"

namespace hlab {

struct GridConfig {
  std::vector<double> half_width;    // one entry per axis, or one shared entry
  std::vector<std::size_t> points;

  GridSpec spec(std::size_t n) const;
  // N halved on every axis; used for the refinement probe.
  GridConfig coarser() const;
};

struct Tolerances {
  double duality = 0.0;      // 1e-6 for n = 1, 1e-5 otherwise
  double fourier = 0.0;      // 1e-3 / 5e-3
  double hilbert = 0.0;      // 1e-3 / 5e-3
  double lp_upper = 0.02;
  double star_upper = 0.05;
  double sup = 1e-9;
  double witness = 0.0;      // 1e-3 / 5e-3
  double scaling_star = 0.01;
  double reflection = 1e-8;
  double sweep_slack = 0.02;
  double quadrature = 1e-10;
};

struct ExperimentConfig {
  std::string kernel_name = "box";
  std::vector<double> kernel_params;
  std::size_t dimension = 1;
  GridConfig grid;
  // Optional per-check grids: duality, fourier, hilbert, bounds, witness, h1.
  std::map<std::string, GridConfig> check_grids;
  std::vector<double> p_list{1.0, 2.0, 4.0, kInfinity};
  std::vector<double> eps_schedule{1e-1, 1e-2, 1e-3};
  std::vector<double> h1_eps_schedule{0.2, 0.1, 0.05};
  double delta = 0.25;
  double lp_radius_power = 2.0;
  Tolerances tolerances;
  std::filesystem::path outputs = "hausdorff_lab_out";
  std::uint64_t seed = 1;
  bool refinement_probe = true;

  // Canonical JSON of the parsed document, used for hashing.
  nlohmann::json canonical;

  // Throws ConfigError on any schema violation.
  static ExperimentConfig from_json(const nlohmann::json& doc);
  static ExperimentConfig load(const std::filesystem::path& path);

  Kernel kernel() const;
  GridConfig grid_for(const std::string& check) const;
  // FNV-1a over the canonical JSON text, as 16 hex digits.
  std::string hash() const;
};

}  // namespace hlab
