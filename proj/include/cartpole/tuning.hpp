#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include "cartpole/catalog.hpp"
#include "cartpole/scenario.hpp"

namespace cartpole {

// Time-domain tuning targets; NaN disables a constraint. Defaults encode
// the benchmark's goals: <10% cart overshoot, <15 deg peak lean, angle
// settled (|theta| <= angle_band_deg) within 3 s.
struct TuningSpec {
  double overshoot_max_pct = 10.0;
  double peak_angle_max_deg = 15.0;
  double angle_settling_max_s = 3.0;
  double angle_band_deg = 2.0;
  double position_settling_max_s = std::nan("");
  double undershoot_max_m = std::nan("");

  bool has(double v) const { return !std::isnan(v); }
};

struct GainBounds {
  PidGains lo;
  PidGains hi;

  // A symmetric box around a centre point, span = fraction of |centre|
  // per gain (gains at zero get +-fraction absolute).
  static GainBounds around(const PidGains& centre, double fraction) {
    auto widen = [fraction](double v, double& lo, double& hi) {
      const double half = std::abs(v) > 0.0 ? std::abs(v) * fraction : fraction;
      lo = v - half;
      hi = v + half;
    };
    GainBounds b{centre, centre};
    widen(centre.kp, b.lo.kp, b.hi.kp);
    widen(centre.ki, b.lo.ki, b.hi.ki);
    widen(centre.kd, b.lo.kd, b.hi.kd);
    return b;
  }
};

struct TuningEval {
  double penalty = 0.0;
  bool stabilized = false;
  bool meets_spec = false;
  Metrics metrics;
  Outcome outcome = Outcome::NotSettled;
};

struct TuningResult {
  bool success = false;            // a stabilizing point meeting the spec was found
  CascadeConfig gains;             // best found
  TuningEval best;
  int evaluations = 0;
};

namespace detail {

inline double angle_settling_time(const TimeSeries& s, double band_deg) {
  const double band = band_deg * M_PI / 180.0;
  double last_outside = 0.0;
  bool outside_at_end = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (std::abs(s.theta[i]) > band) {
      last_outside = s.t[i];
      outside_at_end = i + 1 == s.size();
    }
  }
  if (outside_at_end) return std::numeric_limits<double>::infinity();
  return last_outside - s.t.front();
}

// Scalar penalty: constraint violations weighted 100x the settling term,
// so feasibility dominates; failed runs are penalized by how early they
// failed.
inline TuningEval evaluate_gains(const Scenario& base, const CascadeConfig& cfg,
                                 const TuningSpec& spec) {
  TuningEval ev;
  Scenario sc = base;
  sc.controller = cfg;
  try {
    cfg.validate();
  } catch (const std::exception&) {
    ev.penalty = 1e9;
    return ev;
  }
  const RunResult run = run_scenario(sc);
  const Report rep = make_report(sc, run);
  ev.metrics = rep.metrics;
  ev.outcome = rep.outcome;
  if (run.outcome != RunOutcome::Completed) {
    ev.penalty = 1e7 + 1e5 * (sc.duration - run.end_time);
    return ev;
  }
  ev.stabilized = true;

  double viol = 0.0;
  auto over = [](double v, double lim) { return std::max(0.0, (v - lim) / std::max(lim, 1e-9)); };
  if (spec.has(spec.overshoot_max_pct))
    viol += over(ev.metrics.percent_overshoot.value_or(0.0), spec.overshoot_max_pct);
  if (spec.has(spec.peak_angle_max_deg))
    viol += over(ev.metrics.peak_angle_deg, spec.peak_angle_max_deg);
  if (spec.has(spec.undershoot_max_m))
    viol += over(ev.metrics.undershoot, spec.undershoot_max_m);
  const double ang_settle = angle_settling_time(run.series, spec.angle_band_deg);
  if (spec.has(spec.angle_settling_max_s)) {
    if (std::isinf(ang_settle))
      viol += 10.0;
    else
      viol += over(ang_settle, spec.angle_settling_max_s);
  }
  const double pos_settle =
      ev.metrics.settling_time.value_or(std::numeric_limits<double>::infinity());
  if (spec.has(spec.position_settling_max_s)) {
    if (std::isinf(pos_settle))
      viol += 10.0;
    else
      viol += over(pos_settle, spec.position_settling_max_s);
  }
  if (!ev.metrics.settled()) {
    // graded, so near-settling points beat wildly oscillating ones
    const double band = 0.02 * std::abs(sc.reference.final_value());
    const double tail = std::abs(ev.metrics.steady_state_error);
    viol += 1.0 + std::min(9.0, band > 0.0 ? tail / band : tail);
  }

  ev.penalty = 100.0 * viol +
               (std::isinf(pos_settle) ? sc.duration : pos_settle);
  ev.meets_spec = viol == 0.0;
  return ev;
}

}  // namespace detail

// Coordinate-descent pattern search over both loops' (kp, kd, ki), angle
// loop first, step halving on a full sweep without improvement, fixed
// evaluation budget. Returns the best point found; no optimality claim.
inline TuningResult gain_search(const TuningSpec& spec,
                                const GainBounds& angle_bounds,
                                const GainBounds& position_bounds,
                                const Scenario& base_scenario,
                                int budget = 200) {
  const auto* base_cfg = std::get_if<CascadeConfig>(&base_scenario.controller);
  CascadeConfig cur = base_cfg ? *base_cfg : baseline_cascade();

  // coordinate accessors: angle kp, kd, ki, then position kp, kd, ki
  std::array<double PidGains::*, 3> fields = {&PidGains::kp, &PidGains::kd,
                                              &PidGains::ki};

  TuningResult res;
  res.evaluations = 0;
  auto eval = [&](const CascadeConfig& cfg) {
    ++res.evaluations;
    return detail::evaluate_gains(base_scenario, cfg, spec);
  };

  TuningEval best = eval(cur);
  std::array<double, 6> step{};
  for (int i = 0; i < 3; ++i) {
    step[i] = 0.25 * ((angle_bounds.hi.*fields[i]) - (angle_bounds.lo.*fields[i]));
    step[3 + i] =
        0.25 * ((position_bounds.hi.*fields[i]) - (position_bounds.lo.*fields[i]));
  }

  while (res.evaluations < budget) {
    bool improved = false;
    for (int c = 0; c < 6 && res.evaluations < budget; ++c) {
      const bool angle_loop = c < 3;
      auto field = fields[c % 3];
      const GainBounds& b = angle_loop ? angle_bounds : position_bounds;
      PidGains& target = angle_loop ? cur.angle_pid : cur.position_pid;
      const double lo = b.lo.*field, hi = b.hi.*field;
      const double base_val = target.*field;
      for (const double dir : {+1.0, -1.0}) {
        if (res.evaluations >= budget) break;
        const double cand = std::clamp(base_val + dir * step[c], lo, hi);
        if (cand == base_val) continue;
        CascadeConfig trial = cur;
        PidGains& trial_pid = angle_loop ? trial.angle_pid : trial.position_pid;
        trial_pid.*field = cand;
        const TuningEval ev = eval(trial);
        if (ev.penalty < best.penalty) {
          best = ev;
          cur = trial;
          improved = true;
          break;  // keep the winning direction, move to next coordinate
        }
      }
    }
    if (!improved) {
      bool any = false;
      for (double& s : step) {
        s *= 0.5;
        if (s > 1e-12) any = true;
      }
      if (!any) break;
    }
  }

  res.gains = cur;
  res.best = best;
  res.success = best.stabilized && best.meets_spec;
  return res;
}

}  // namespace cartpole
