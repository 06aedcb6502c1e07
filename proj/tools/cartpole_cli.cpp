// Command-line front end: run the scenario catalog, recompute metrics
// from exported traces, sweep scenario parameters, tune cascade gains.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cartpole/catalog.hpp"
#include "cartpole/config.hpp"
#include "cartpole/csv.hpp"
#include "cartpole/metrics.hpp"
#include "cartpole/scenario.hpp"
#include "cartpole/tuning.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitFellOver = 2;
constexpr int kExitTrackExceeded = 3;
constexpr int kExitSearchFailed = 4;

using namespace cartpole;

void print_report(const Report& rep) {
  const Metrics& m = rep.metrics;
  std::printf("scenario          : %s\n", rep.scenario.c_str());
  std::printf("outcome           : %s\n", to_string(rep.outcome));
  std::printf("reference         : %g m\n", rep.reference_final);
  if (m.percent_overshoot)
    std::printf("overshoot         : %.3f %%\n", *m.percent_overshoot);
  else
    std::printf("overshoot         : n/a (zero-height step)\n");
  std::printf("undershoot        : %.4f m\n", m.undershoot);
  std::printf("peak |theta|      : %.3f deg\n", m.peak_angle_deg);
  if (m.settling_time)
    std::printf("settling time     : %.3f s\n", *m.settling_time);
  else
    std::printf("settling time     : not settled\n");
  if (m.rise_time) std::printf("rise time         : %.3f s\n", *m.rise_time);
  std::printf("steady-state error: %.5f m\n", m.steady_state_error);
  std::printf("max |x|           : %.4f m\n", m.max_abs_x);
  std::printf("saturation duty   : %.2f %%\n", m.saturation_duty_pct);
  std::printf("track violation   : %s\n", m.track_violation ? "yes" : "no");
}

int outcome_exit_code(Outcome o) {
  switch (o) {
    case Outcome::FellOver: return kExitFellOver;
    case Outcome::TrackExceeded: return kExitTrackExceeded;
    default: return kExitOk;
  }
}

Scenario resolve_scenario(const std::string& name, const std::string& config,
                          std::optional<unsigned> seed,
                          std::optional<double> dt) {
  if (name.empty() == config.empty())
    throw ConfigError("give exactly one of --scenario or --config");
  Scenario sc = name.empty() ? cfg::load_scenario_file(config)
                             : find_scenario(name);
  if (seed) sc.seed = *seed;
  if (dt) sc.dt = *dt;
  sc.validate();
  return sc;
}

int cmd_list() {
  for (const Scenario& s : builtin_scenarios())
    std::printf("%-3s %-62s [%s]\n", s.name.c_str(), s.description.c_str(),
                s.figure.c_str());
  return kExitOk;
}

int cmd_run(const std::string& name, const std::string& config,
            std::optional<unsigned> seed, std::optional<double> dt,
            const std::string& out) {
  const Scenario sc = resolve_scenario(name, config, seed, dt);
  const RunResult run = run_scenario(sc);
  if (!out.empty()) {
    write_series_csv(out, run.series);
    std::printf("trace             : %s (%zu rows)\n", out.c_str(),
                run.series.size());
  }
  const Report rep = make_report(sc, run);
  print_report(rep);
  return outcome_exit_code(rep.outcome);
}

int cmd_metrics(const std::string& csv_path, double reference, double band,
                double force_limit) {
  const TimeSeries s = read_series_csv_file(csv_path);
  Report rep;
  rep.scenario = csv_path;
  rep.reference_final = reference;
  rep.metrics = compute_metrics(s, reference, band, force_limit);
  rep.outcome = rep.metrics.settled() ? Outcome::Settled : Outcome::NotSettled;
  print_report(rep);
  return kExitOk;
}

// Numeric scenario fields addressable by cmd_sweep.
const std::vector<std::string>& sweep_paths() {
  static const std::vector<std::string> paths = {
      "reference",       "disturbance",       "plant.cart_mass",
      "plant.pendulum_mass", "plant.length",  "plant.friction",
      "dt",              "duration",          "track_half_length"};
  return paths;
}

void apply_sweep_value(Scenario& sc, const std::string& path, double value) {
  if (path == "reference") {
    sc.reference = Signal::step(value, sc.reference.empty()
                                           ? 0.0
                                           : sc.reference.segments().front().first);
  } else if (path == "disturbance") {
    std::vector<std::pair<double, double>> segs;
    for (auto [t, v] : sc.disturbance.segments())
      segs.emplace_back(t, v != 0.0 ? value : 0.0);
    sc.disturbance = Signal(std::move(segs));
  } else if (path == "plant.cart_mass") {
    sc.plant = PlantParams(value, sc.plant.m, sc.plant.l, sc.plant.lc,
                           sc.plant.I, sc.plant.g, sc.plant.b);
  } else if (path == "plant.pendulum_mass") {
    sc.plant = PlantParams::uniform_rod(sc.plant.M, value, sc.plant.l,
                                        sc.plant.g, sc.plant.b);
  } else if (path == "plant.length") {
    sc.plant = PlantParams::uniform_rod(sc.plant.M, sc.plant.m, value,
                                        sc.plant.g, sc.plant.b);
  } else if (path == "plant.friction") {
    sc.plant = PlantParams(sc.plant.M, sc.plant.m, sc.plant.l, sc.plant.lc,
                           sc.plant.I, sc.plant.g, value);
  } else if (path == "dt") {
    sc.dt = value;
  } else if (path == "duration") {
    sc.duration = value;
  } else if (path == "track_half_length") {
    sc.track_half_length = value;
  } else {
    std::string msg = "unknown sweep path '" + path + "'; valid paths:";
    for (const std::string& p : sweep_paths()) msg += " " + p;
    throw ConfigError(msg);
  }
}

int cmd_sweep(const std::string& name, const std::string& config,
              std::optional<unsigned> seed, std::optional<double> dt,
              const std::string& path, const std::vector<double>& values,
              const std::string& out_dir) {
  if (values.empty()) throw ConfigError("sweep needs at least one value");
  const Scenario base = resolve_scenario(name, config, seed, dt);
  if (!out_dir.empty()) std::filesystem::create_directories(out_dir);
  std::printf("%-12s %-14s %10s %10s %10s %10s\n", "value", "outcome",
              "peak|x|", "overshoot", "settle", "peak|th|");
  int worst = kExitOk;
  for (std::size_t i = 0; i < values.size(); ++i) {
    Scenario sc = base;
    apply_sweep_value(sc, path, values[i]);
    sc.name = base.name + "[" + path + "=" + format_double(values[i]) + "]";
    const RunResult run = run_scenario(sc);
    const Report rep = make_report(sc, run);
    if (!out_dir.empty()) {
      const std::string file =
          out_dir + "/sweep_" + std::to_string(i) + ".csv";
      write_series_csv(file, run.series);
    }
    const Metrics& m = rep.metrics;
    std::printf("%-12s %-14s %10.4f %10s %10s %10.3f\n",
                format_double(values[i]).c_str(), to_string(rep.outcome),
                m.max_abs_x,
                m.percent_overshoot ? format_double(*m.percent_overshoot).c_str() : "n/a",
                m.settling_time ? format_double(*m.settling_time).c_str() : "never",
                m.peak_angle_deg);
    worst = std::max(worst, outcome_exit_code(rep.outcome));
  }
  return worst;
}

int cmd_tune(const std::string& name, const std::string& config,
             std::optional<unsigned> seed, std::optional<double> dt,
             const std::string& spec_path, const std::string& out,
             double bounds_fraction, int budget) {
  const Scenario base = resolve_scenario(name, config, seed, dt);
  TuningSpec spec;
  if (!spec_path.empty()) {
    const auto j = cfg::load_json_file(spec_path);
    spec.overshoot_max_pct = cfg::num(j, "overshoot_max_pct", spec.overshoot_max_pct);
    spec.peak_angle_max_deg = cfg::num(j, "peak_angle_max_deg", spec.peak_angle_max_deg);
    spec.angle_settling_max_s = cfg::num(j, "angle_settling_max_s", spec.angle_settling_max_s);
    spec.angle_band_deg = cfg::num(j, "angle_band_deg", spec.angle_band_deg);
    spec.position_settling_max_s = cfg::num(j, "position_settling_max_s", spec.position_settling_max_s);
    spec.undershoot_max_m = cfg::num(j, "undershoot_max_m", spec.undershoot_max_m);
  }
  const auto* cas = std::get_if<CascadeConfig>(&base.controller);
  if (!cas) throw ConfigError("tune requires a cascade-controlled base scenario");
  const GainBounds ab = GainBounds::around(cas->angle_pid, bounds_fraction);
  const GainBounds pb = GainBounds::around(cas->position_pid, bounds_fraction);
  const TuningResult res = gain_search(spec, ab, pb, base, budget);
  std::printf("evaluations       : %d\n", res.evaluations);
  std::printf("search            : %s\n", res.success ? "spec met" : "search failed");
  std::printf("angle gains       : kp=%g ki=%g kd=%g\n", res.gains.angle_pid.kp,
              res.gains.angle_pid.ki, res.gains.angle_pid.kd);
  std::printf("position gains    : kp=%g ki=%g kd=%g\n",
              res.gains.position_pid.kp, res.gains.position_pid.ki,
              res.gains.position_pid.kd);
  Scenario tuned = base;
  tuned.controller = res.gains;
  Report rep;
  rep.scenario = base.name + " (tuned)";
  rep.outcome = res.best.outcome;
  rep.metrics = res.best.metrics;
  rep.reference_final = base.reference.final_value();
  print_report(rep);
  if (!out.empty()) {
    std::ofstream f(out);
    if (!f) throw ConfigError("cannot write " + out);
    f << cfg::scenario_to_json(tuned).dump(2) << "\n";
    std::printf("tuned scenario    : %s\n", out.c_str());
  }
  return res.success ? kExitOk : kExitSearchFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cart-pole cascade PID / LQR simulation bench"};
  app.require_subcommand(1);

  std::string scenario, config, out, param, spec_path, csv_path;
  std::string format = "csv";
  std::optional<unsigned> seed;
  std::optional<double> dt;
  std::vector<double> values;
  double reference = 0.0, band = 0.02, force_limit = 12.0;
  double bounds_fraction = 0.5;
  int budget = 200;

  app.add_subcommand("list", "list the built-in scenarios");

  auto add_common = [&](CLI::App* c) {
    c->add_option("--scenario,-s", scenario, "built-in scenario name (S1..S6)");
    c->add_option("--config,-c", config, "scenario config file (json)");
    c->add_option("--seed", seed, "override the random seed");
    c->add_option("--dt", dt, "override the integration step (s)");
    c->add_option("--format", format, "trace export format (csv)")
        ->check(CLI::IsMember({"csv"}));
  };

  CLI::App* run = app.add_subcommand("run", "run a scenario and export the trace");
  add_common(run);
  run->add_option("--out,-o", out, "trace csv path");

  CLI::App* metrics = app.add_subcommand("metrics", "recompute metrics from a trace csv");
  metrics->add_option("csv", csv_path, "exported trace")->required();
  metrics->add_option("--reference,-r", reference, "final reference value (m)")->required();
  metrics->add_option("--band", band, "settling band fraction");
  metrics->add_option("--force-limit", force_limit, "saturation threshold (N)");

  CLI::App* sweep = app.add_subcommand("sweep", "run a scenario family over a parameter");
  add_common(sweep);
  sweep->add_option("--param,-p", param, "parameter path")->required();
  sweep->add_option("--values,-v", values, "values to sweep")->delimiter(',');
  sweep->add_option("--out,-o", out, "directory for per-run traces");

  CLI::App* tune = app.add_subcommand("tune", "search cascade gains against a spec");
  add_common(tune);
  tune->add_option("--spec", spec_path, "tuning spec file (json)");
  tune->add_option("--out,-o", out, "write the tuned scenario config here");
  tune->add_option("--bounds", bounds_fraction, "search box half-width as a fraction of each gain");
  tune->add_option("--budget", budget, "evaluation budget");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (app.got_subcommand("list")) return cmd_list();
    if (app.got_subcommand("run")) return cmd_run(scenario, config, seed, dt, out);
    if (app.got_subcommand("metrics")) return cmd_metrics(csv_path, reference, band, force_limit);
    if (app.got_subcommand("sweep")) return cmd_sweep(scenario, config, seed, dt, param, values, out);
    if (app.got_subcommand("tune")) return cmd_tune(scenario, config, seed, dt, spec_path, out, bounds_fraction, budget);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitConfig;
  } catch (const CsvError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitConfig;
  }
  return kExitConfig;
}
