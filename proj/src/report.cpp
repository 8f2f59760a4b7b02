#include "hlab/report.hpp"

#include <cmath>
#include <cstdio>

namespace hlab {

CheckReport make_check(std::string name, double residual, double tolerance, nlohmann::json context) {
  CheckReport r;
  r.name = std::move(name);
  r.residual = residual;
  r.tolerance = tolerance;
  r.passed = residual <= tolerance;
  r.context = context.is_null() ? nlohmann::json::object() : std::move(context);
  return r;
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

nlohmann::json json_number(double v) {
  if (!std::isfinite(v)) return format_number(v);
  // round-trip through the 12-digit text so reports are stable across platforms
  return std::stod(format_number(v));
}

nlohmann::json to_json(const CheckReport& r) {
  return {{"name", r.name},
          {"residual", json_number(r.residual)},
          {"tolerance", json_number(r.tolerance)},
          {"passed", r.passed},
          {"context", r.context}};
}

}  // namespace hlab
