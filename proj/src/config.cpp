#include "hlab/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

#include "hlab/errors.hpp"

namespace hlab {

namespace {

using nlohmann::json;

void only_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [key, value] : obj.items())
    if (!allowed.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
}

double number(const json& v, const std::string& where) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "inf" || s == "infinity") return kInfinity;
  }
  throw ConfigError(where + " must be a number");
}

std::vector<double> numbers(const json& v, const std::string& where) {
  if (v.is_number() || v.is_string()) return {number(v, where)};
  if (!v.is_array()) throw ConfigError(where + " must be a number or a list of numbers");
  std::vector<double> out;
  for (const auto& x : v) out.push_back(number(x, where));
  return out;
}

bool power_of_two(std::size_t n) { return n >= 2 && (n & (n - 1)) == 0; }

GridConfig parse_grid(const json& g, const std::string& where) {
  only_keys(g, {"L", "N"}, where);
  if (!g.contains("L") || !g.contains("N")) throw ConfigError(where + " needs L and N");
  GridConfig out;
  out.half_width = numbers(g["L"], where + ".L");
  for (double L : out.half_width)
    if (!(L > 0.0) || !std::isfinite(L)) throw ConfigError(where + ".L must be positive");
  for (double N : numbers(g["N"], where + ".N")) {
    if (!(N >= 2.0) || N != std::floor(N) || N > 1e12) throw ConfigError(where + ".N must be an integer");
    const auto count = static_cast<std::size_t>(N);
    if (!power_of_two(count)) throw ConfigError(where + ".N must be a power of two");
    out.points.push_back(count);
  }
  return out;
}

json grid_json(const GridConfig& g) { return {{"L", g.half_width}, {"N", g.points}}; }

json number_json(double v) { return std::isinf(v) ? json("inf") : json(v); }

}  // namespace

GridSpec GridConfig::spec(std::size_t n) const {
  auto pick = [n](const auto& v, const char* what) {
    using T = typename std::decay_t<decltype(v)>::value_type;
    if (v.size() == 1) return std::vector<T>(n, v[0]);
    if (v.size() != n) throw ConfigError(std::string("grid ") + what + " needs one entry or one per axis");
    return v;
  };
  GridSpec s;
  s.half_width = pick(half_width, "L");
  s.points = pick(points, "N");
  s.centering = Centering::cell;
  return s;
}

GridConfig GridConfig::coarser() const {
  GridConfig c = *this;
  for (auto& N : c.points) N = std::max<std::size_t>(2, N / 2);
  return c;
}

ExperimentConfig ExperimentConfig::from_json(const json& doc) {
  only_keys(doc, {"kernel", "grid", "check_grids", "p_list", "eps_schedule", "h1_eps_schedule", "delta",
                  "lp_radius_power", "tolerances", "outputs", "seed", "refinement_probe"},
            "config");
  ExperimentConfig c;
  if (!doc.contains("kernel")) throw ConfigError("config needs a kernel");
  const json& k = doc["kernel"];
  only_keys(k, {"name", "params", "n"}, "kernel");
  if (!k.contains("name") || !k["name"].is_string()) throw ConfigError("kernel.name must be a string");
  c.kernel_name = k["name"].get<std::string>();
  if (k.contains("params")) c.kernel_params = numbers(k["params"], "kernel.params");
  if (k.contains("n")) {
    if (!k["n"].is_number_integer() || k["n"].get<long>() < 1) throw ConfigError("kernel.n must be a positive integer");
    c.dimension = k["n"].get<std::size_t>();
  }
  if (!doc.contains("grid")) throw ConfigError("config needs a grid");
  c.grid = parse_grid(doc["grid"], "grid");
  c.grid.spec(c.dimension);
  if (doc.contains("check_grids")) {
    const std::set<std::string> names{"duality", "fourier", "hilbert", "bounds", "witness", "h1"};
    only_keys(doc["check_grids"], names, "check_grids");
    for (const auto& [name, g] : doc["check_grids"].items()) {
      c.check_grids[name] = parse_grid(g, "check_grids." + name);
      c.check_grids[name].spec(c.dimension);
    }
  }
  if (doc.contains("p_list")) {
    c.p_list = numbers(doc["p_list"], "p_list");
    for (double p : c.p_list)
      if (!(p >= 1.0)) throw ConfigError("p_list entries must lie in [1, inf]");
  }
  auto schedule = [&](const char* key, std::vector<double>& dst) {
    if (!doc.contains(key)) return;
    if (!doc[key].is_array()) throw ConfigError(std::string(key) + " must be a list");
    dst = numbers(doc[key], key);
    for (double e : dst)
      if (!(e > 0.0) || !std::isfinite(e)) throw ConfigError(std::string(key) + " entries must be positive");
  };
  schedule("eps_schedule", c.eps_schedule);
  schedule("h1_eps_schedule", c.h1_eps_schedule);
  if (doc.contains("delta")) {
    c.delta = number(doc["delta"], "delta");
    if (!(c.delta > 0.0 && c.delta < 1.0)) throw ConfigError("delta must lie in (0, 1)");
  }
  if (doc.contains("lp_radius_power")) {
    c.lp_radius_power = number(doc["lp_radius_power"], "lp_radius_power");
    if (!(c.lp_radius_power >= 1.0) || !std::isfinite(c.lp_radius_power))
      throw ConfigError("lp_radius_power must be at least 1");
  }
  const bool one = c.dimension == 1;
  c.tolerances.duality = one ? 1e-6 : 1e-5;
  c.tolerances.fourier = one ? 1e-3 : 5e-3;
  c.tolerances.hilbert = one ? 1e-3 : 5e-3;
  c.tolerances.witness = one ? 1e-3 : 5e-3;
  if (doc.contains("tolerances")) {
    const json& t = doc["tolerances"];
    std::map<std::string, double*> slots{{"duality", &c.tolerances.duality},
                                         {"fourier", &c.tolerances.fourier},
                                         {"hilbert", &c.tolerances.hilbert},
                                         {"lp_upper", &c.tolerances.lp_upper},
                                         {"star_upper", &c.tolerances.star_upper},
                                         {"sup", &c.tolerances.sup},
                                         {"witness", &c.tolerances.witness},
                                         {"scaling_star", &c.tolerances.scaling_star},
                                         {"reflection", &c.tolerances.reflection},
                                         {"sweep_slack", &c.tolerances.sweep_slack},
                                         {"quadrature", &c.tolerances.quadrature}};
    std::set<std::string> names;
    for (const auto& [name, slot] : slots) names.insert(name);
    only_keys(t, names, "tolerances");
    for (const auto& [name, v] : t.items()) {
      const double x = number(v, "tolerances." + name);
      if (!(x > 0.0) || !std::isfinite(x)) throw ConfigError("tolerances." + name + " must be positive");
      *slots[name] = x;
    }
  }
  if (doc.contains("outputs")) {
    if (!doc["outputs"].is_string()) throw ConfigError("outputs must be a path string");
    c.outputs = doc["outputs"].get<std::string>();
  }
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_integer() || doc["seed"].get<long long>() < 0)
      throw ConfigError("seed must be a non-negative integer");
    c.seed = doc["seed"].get<std::uint64_t>();
  }
  if (doc.contains("refinement_probe")) {
    if (!doc["refinement_probe"].is_boolean()) throw ConfigError("refinement_probe must be true or false");
    c.refinement_probe = doc["refinement_probe"].get<bool>();
  }
  try {
    c.kernel();
  } catch (const PreconditionError& e) {
    throw ConfigError(std::string("kernel: ") + e.what());
  }

  json canon;
  canon["kernel"] = {{"name", c.kernel_name}, {"params", c.kernel_params}, {"n", c.dimension}};
  canon["grid"] = grid_json(c.grid);
  canon["check_grids"] = json::object();
  for (const auto& [name, g] : c.check_grids) canon["check_grids"][name] = grid_json(g);
  canon["p_list"] = json::array();
  for (double p : c.p_list) canon["p_list"].push_back(number_json(p));
  canon["eps_schedule"] = c.eps_schedule;
  canon["h1_eps_schedule"] = c.h1_eps_schedule;
  canon["delta"] = c.delta;
  canon["lp_radius_power"] = c.lp_radius_power;
  const Tolerances& t = c.tolerances;
  canon["tolerances"] = {{"duality", t.duality},       {"fourier", t.fourier},     {"hilbert", t.hilbert},
                         {"lp_upper", t.lp_upper},     {"star_upper", t.star_upper}, {"sup", t.sup},
                         {"witness", t.witness},       {"scaling_star", t.scaling_star},
                         {"reflection", t.reflection}, {"sweep_slack", t.sweep_slack},
                         {"quadrature", t.quadrature}};
  canon["seed"] = c.seed;
  canon["refinement_probe"] = c.refinement_probe;
  c.canonical = canon;
  return c;
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("config " + path.string() + " is not valid JSON: " + e.what());
  }
  return from_json(doc);
}

Kernel ExperimentConfig::kernel() const {
  if (kernel_name == "zero") {
    if (!kernel_params.empty()) throw PreconditionError("the zero kernel takes no parameters");
    return zero_kernel(dimension);
  }
  return make_named_kernel(kernel_name, kernel_params, dimension);
}

GridConfig ExperimentConfig::grid_for(const std::string& check) const {
  const auto it = check_grids.find(check);
  return it == check_grids.end() ? grid : it->second;
}

std::string ExperimentConfig::hash() const {
  const std::string text = canonical.dump();
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace hlab
