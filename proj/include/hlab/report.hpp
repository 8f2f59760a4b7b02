#pragma once

#include <string>

#include <nlohmann/json.hpp>

namespace hlab {

struct CheckReport {
  std::string name;
  double residual = 0.0;
  double tolerance = 0.0;
  bool passed = false;
  nlohmann::json context = nlohmann::json::object();
};

// passed is residual <= tolerance; a NaN residual never passes.
CheckReport make_check(std::string name, double residual, double tolerance, nlohmann::json context = {});

// 12 significant digits; "inf", "-inf", "nan" for the non-finite values.
std::string format_number(double v);

// Non-finite numbers become the strings above, everything else stays numeric.
nlohmann::json json_number(double v);
nlohmann::json to_json(const CheckReport& r);

}  // namespace hlab
