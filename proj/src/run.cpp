#include "hlab/run.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <functional>
#include <limits>
#include <ostream>

#include "hlab/battery.hpp"
#include "hlab/errors.hpp"
#include "hlab/extremal.hpp"
#include "hlab/verify.hpp"

namespace hlab {

namespace {

using nlohmann::json;

json grid_json(const GridSpec& s) { return {{"L", s.half_width}, {"N", s.points}, {"centering", "cell"}}; }

BatteryFunction power(const BatteryFunction& f, std::size_t n) {
  return n == 1 ? f : battery::tensor(std::vector<BatteryFunction>(n, f));
}

double regularized(double a, double b) {
  if (std::isinf(a) && std::isinf(b)) return 0.0;
  return std::abs(a - b) / (1.0 + std::abs(b));
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw Error("failed writing " + path.string());
}

std::string p_label(double p) { return std::isinf(p) ? "inf" : format_number(p); }

class Runner {
 public:
  Runner(const ExperimentConfig& c, std::ostream* log) : c_(c), k_(c.kernel()), n_(c.dimension), log_(log) {
    q_.tolerance = n_ == 1 ? 1e-11 : 1e-9;  // per-axis tolerances get split and rescaled for n > 1
    q_.max_subdivisions = 400;
  }

  RunSummary run(RunParts parts) {
    std::filesystem::create_directories(c_.outputs);
    if (parts.norms) norms();
    if (parts.sweeps) sweeps();
    if (parts.checks) checks();
    return std::move(out_);
  }

 private:
  void note(const std::string& s) {
    if (log_) *log_ << s << '\n';
  }

  void skip(const std::string& name, const std::string& why) {
    out_.skipped.push_back(name + ": " + why);
    note("skip " + name + ": " + why);
  }

  bool finite_moment(double alpha) const {
    const auto m = moment(k_, alpha, c_.tolerances.quadrature);
    return !m.divergent && std::isfinite(m.value);
  }

  void norms() {
    std::string csv =
        "kernel,n,p,moment_1_minus_1_over_p,moment_1_over_p,moment_0,moment_1,"
        "converged_1_minus_1_over_p,converged_1_over_p,converged_0,converged_1\n";
    auto settled = [](const MomentReport& m) { return m.converged || m.divergent; };
    const auto m0 = moment(k_, 0.0, c_.tolerances.quadrature);
    const auto m1 = moment(k_, 1.0, c_.tolerances.quadrature);
    for (double p : c_.p_list) {
      const double inv = std::isinf(p) ? 0.0 : 1.0 / p;
      const auto direct = moment(k_, 1.0 - inv, c_.tolerances.quadrature);
      const auto adjoint = moment(k_, inv, c_.tolerances.quadrature);
      const MomentReport* all[] = {&direct, &adjoint, &m0, &m1};
      csv += k_.label() + ',' + std::to_string(n_) + ',' + p_label(p);
      for (const auto* m : all) csv += ',' + format_number(m->value);
      for (const auto* m : all) {
        csv += settled(*m) ? ",true" : ",false";
        if (!settled(*m)) out_.passed = false;
      }
      csv += '\n';
    }
    const auto path = c_.outputs / "norms.csv";
    write_text(path, csv);
    out_.files.push_back(path);
  }

  void sweeps() {
    if (c_.eps_schedule.empty()) throw ConfigError("eps_schedule is empty");
    if (c_.h1_eps_schedule.empty()) throw ConfigError("h1_eps_schedule is empty");
    json doc{{"timestamp", iso_timestamp()}, {"config_hash", c_.hash()}, {"kernel", k_.label()}, {"n", n_}};
    doc["sweeps"] = json::array();
    auto record = [&](const std::string& name, const SweepResult& r, const std::filesystem::path& path) {
      write_sweep_csv(r, path);
      out_.files.push_back(path);
      if (!r.converged) out_.passed = false;
      doc["sweeps"].push_back({{"name", name},
                               {"file", path.filename().string()},
                               {"extrapolated", json_number(r.extrapolated)},
                               {"target", json_number(r.target)},
                               {"converged", r.converged},
                               {"notes", r.notes}});
      note(name + ": extrapolated " + format_number(r.extrapolated) + " target " + format_number(r.target) +
           (r.converged ? "" : " (not converged)"));
    };
    LpSweepOptions lo;
    lo.radius_power = c_.lp_radius_power;
    lo.slack = c_.tolerances.sweep_slack;
    for (double p : c_.p_list) {
      const std::string name = "lp_sweep_p" + p_label(p);
      if (std::isinf(p)) {
        skip(name, "no extremal family at p = inf");
        continue;
      }
      try {
        record(name, lp_lower_bound_sweep(k_, p, c_.eps_schedule, lo), c_.outputs / ("sweep_lp_p" + p_label(p) + ".csv"));
      } catch (const PreconditionError& e) {
        skip(name, e.what());
      }
    }
    H1SweepOptions ho = H1SweepOptions::for_dimension(n_);
    if (c_.check_grids.count("h1")) {
      const GridSpec s = c_.grid_for("h1").spec(n_);
      ho.half_width = s.half_width[0];
      ho.points = s.points[0];
    }
    try {
      record("h1_sweep", h1_lower_bound_sweep(k_, c_.delta, c_.h1_eps_schedule, ho), c_.outputs / "sweep_h1.csv");
    } catch (const PreconditionError& e) {
      skip("h1_sweep", e.what());
    }
    const auto path = c_.outputs / "sweeps.json";
    write_text(path, doc.dump(2) + "\n");
    out_.files.push_back(path);
  }

  // Runs one check, turning exceptions into failed reports.
  void guarded(const std::string& name, double tolerance, const std::function<std::vector<CheckReport>()>& body) {
    const auto start = std::chrono::steady_clock::now();
    std::vector<CheckReport> got;
    try {
      got = body();
    } catch (const std::exception& e) {
      got = {make_check(name, std::numeric_limits<double>::quiet_NaN(), tolerance, {{"error", e.what()}})};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    for (auto& r : got) {
      note(std::string(r.passed ? "PASS " : "FAIL ") + r.name + " residual " + format_number(r.residual) +
           " tol " + format_number(r.tolerance) + " (" + format_number(secs) + " s)");
      if (!r.passed) out_.passed = false;
      out_.checks.push_back(std::move(r));
    }
  }

  // Grid check with a rerun at N / 2 on every axis.
  void probed(const std::string& grid_name, double tolerance,
              const std::function<CheckReport(const GridSpec&)>& body) {
    const GridConfig g = c_.grid_for(grid_name);
    guarded(grid_name, tolerance, [&] {
      CheckReport r = body(g.spec(n_));
      if (c_.refinement_probe) {
        const CheckReport coarse = body(g.coarser().spec(n_));
        r.context["coarse_residual"] = json_number(coarse.residual);
        r.context["refinement_sensitive"] = !(coarse.residual <= tolerance);
      }
      return std::vector<CheckReport>{r};
    });
  }

  void checks() {
    const Tolerances& t = c_.tolerances;
    const bool has_m0 = finite_moment(0.0);
    const BatteryFunction gauss = power(battery::gaussian(), n_);

    if (finite_moment(0.5)) {
      probed("duality", t.duality,
             [&](const GridSpec& s) { return check_duality(k_, gauss.f, gauss.f, s, t.duality, q_); });
    } else {
      skip("duality", "moment of order 1/2 diverges");
    }
    if (has_m0) {
      probed("fourier", t.fourier,
             [&](const GridSpec& s) { return check_fourier_commutation(k_, gauss, s, t.fourier, q_); });
      const BatteryFunction odd = power(battery::odd_rational(), n_);
      probed("hilbert", t.hilbert,
             [&](const GridSpec& s) { return check_hilbert_commutation(k_, odd, 0, s, t.hilbert, q_); });
    } else {
      skip("fourier", "kernel mass diverges");
      skip("hilbert", "kernel mass diverges");
    }

    const GridSpec bounds = c_.grid_for("bounds").spec(n_);
    auto lp_members = battery::lp_battery(n_);
    lp_members.push_back(battery::random_mix(c_.seed, n_));
    for (double p : c_.p_list) {
      if (std::isinf(p)) {
        guarded("sup_norm", t.sup, [&] { return std::vector{check_sup_norm(k_, lp_members, bounds, t.sup, q_)}; });
        continue;
      }
      guarded("lp_upper_bound", t.lp_upper, [&] {
        auto reps = check_upper_bound(k_, p, lp_members, NormKind::lp, bounds, t.lp_upper, q_);
        for (auto& r : reps) r.name += "_p" + p_label(p) + "_" + r.context["function"].get<std::string>();
        return reps;
      });
    }
    if (has_m0) {
      guarded("star_upper_bound", t.star_upper, [&] {
        auto reps = check_upper_bound(k_, 1.0, battery::hardy_battery(n_), NormKind::star, bounds, t.star_upper, q_);
        for (auto& r : reps) r.name += "_" + r.context["function"].get<std::string>();
        return reps;
      });
      guarded("witness", t.witness, [&] {
        WitnessOptions wo = WitnessOptions::for_dimension(n_);
        if (c_.check_grids.count("witness")) {
          const GridSpec s = c_.grid_for("witness").spec(n_);
          wo.half_width = s.half_width[0];
          wo.points = s.points[0];
        }
        const auto [lhs, rhs] = necessary_condition_witness(k_, wo);
        json ctx{{"lhs", json_number(lhs)}, {"rhs", json_number(rhs)}, {"L", wo.half_width}, {"N", wo.points}};
        return std::vector{make_check("witness", regularized(lhs, rhs), t.witness, ctx)};
      });
    } else {
      skip("star_upper_bound", "kernel mass diverges");
      skip("witness", "kernel mass diverges");
    }

    guarded("scaling", t.scaling_star, [&] {
      auto reps = scaling_check(sample(gauss.f, bounds), 2);
      for (auto& r : reps)
        if (r.name == "scaling_star") r = make_check(r.name, r.residual, t.scaling_star, r.context);
      return reps;
    });

    guarded("reflection", t.reflection, [&] {
      const Kernel mirrored = reflect(k_);
      std::vector<CheckReport> reps;
      for (double a : {0.25, 0.5, 0.75}) {
        const double lhs = moment(mirrored, a, t.quadrature).value;
        const double rhs = moment(k_, 1.0 - a, t.quadrature).value;
        reps.push_back(make_check("reflection_alpha" + format_number(a), regularized(lhs, rhs), t.reflection,
                                  {{"reflected", json_number(lhs)}, {"direct", json_number(rhs)}}));
      }
      return reps;
    });

    json doc{{"timestamp", iso_timestamp()}, {"config_hash", c_.hash()}, {"kernel", k_.label()}, {"n", n_}};
    json grids{{"grid", grid_json(c_.grid.spec(n_))}};
    for (const auto& [name, g] : c_.check_grids) grids[name] = grid_json(g.spec(n_));
    doc["grids"] = grids;
    doc["checks"] = json::array();
    json flagged = json::array();
    for (const auto& r : out_.checks) {
      doc["checks"].push_back(to_json(r));
      if (r.context.value("refinement_sensitive", false)) flagged.push_back(r.name);
    }
    doc["refinement_sensitive"] = flagged;
    doc["skipped"] = out_.skipped;
    doc["passed"] = out_.passed;
    const auto path = c_.outputs / "check_report.json";
    write_text(path, doc.dump(2) + "\n");
    out_.files.push_back(path);
    out_.document = std::move(doc);
  }

  const ExperimentConfig& c_;
  Kernel k_;
  std::size_t n_;
  std::ostream* log_;
  QuadConfig q_;
  RunSummary out_;
};

}  // namespace

std::string iso_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm utc{};
  gmtime_r(&now, &utc);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &utc);
  return buf;
}

RunSummary run_report(const ExperimentConfig& config, RunParts parts, std::ostream* log) {
  return Runner(config, log).run(parts);
}

}  // namespace hlab
