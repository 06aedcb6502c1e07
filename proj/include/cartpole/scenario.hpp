#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <variant>

#include "cartpole/hwemu.hpp"
#include "cartpole/metrics.hpp"
#include "cartpole/pid.hpp"
#include "cartpole/plant.hpp"
#include "cartpole/riccati.hpp"
#include "cartpole/series.hpp"
#include "cartpole/signal.hpp"

namespace cartpole {

enum class SensingMode { Ideal, HardwareEmulated };

// Where the disturbance signal pushes: summed with the cart force, or a
// horizontal force at the rod centre of mass. Rejecting the latter needs
// cart acceleration ~ dF / pendulum mass, which is what separates the
// light and heavy rods in the disturbance scenarios.
enum class DisturbanceTarget { Cart, PendulumCom };

struct SensorModels {
  EncoderModel encoder;
  UltrasonicModel ultrasonic;
};

struct Scenario {
  std::string name;
  std::string description;
  std::string figure;  // figure anchor for the catalog listing

  PlantParams plant = PlantParams::benchmark();
  std::variant<CascadeConfig, HybridConfig, EmbeddedCascadeConfig> controller =
      CascadeConfig{};
  SensingMode sensing = SensingMode::Ideal;
  SensorModels sensors;
  Signal reference;          // m
  Signal disturbance;        // N
  DisturbanceTarget disturbance_target = DisturbanceTarget::Cart;
  State initial;
  double duration = 15.0;    // s
  double dt = 1e-3;          // s
  std::optional<double> track_half_length;  // m
  std::uint32_t seed = 0;

  double controller_period() const {
    if (const auto* c = std::get_if<CascadeConfig>(&controller)) return c->angle_pid.ts;
    if (const auto* h = std::get_if<HybridConfig>(&controller)) return h->lqr.ts;
    return std::get<EmbeddedCascadeConfig>(controller).angle_pid.sample_period;
  }

  void validate() const {
    plant.validate();
    if (!(duration > 0.0)) throw std::invalid_argument("duration must be > 0");
    if (!(dt > 0.0)) throw std::invalid_argument("dt must be > 0");
    if (track_half_length && !(*track_half_length > 0.0))
      throw std::invalid_argument("track half length must be > 0");
    std::visit([](const auto& c) { c.validate(); }, controller);
    sensors.encoder.validate();
    sensors.ultrasonic.validate();
    auto divides = [this](double period, const char* what) {
      const double ratio = period / dt;
      if (ratio < 1.0 - 1e-9 || std::abs(ratio - std::round(ratio)) > 1e-6)
        throw std::invalid_argument(std::string(what) + " period must be a multiple of dt");
    };
    divides(controller_period(), "controller");
    if (const auto* c = std::get_if<CascadeConfig>(&controller))
      divides(c->position_pid.ts, "outer loop");
    if (sensing == SensingMode::HardwareEmulated)
      divides(sensors.ultrasonic.sample_period, "ultrasonic");
  }
};

enum class RunOutcome { Completed, FellOver, TrackExceeded };

inline const char* to_string(RunOutcome o) {
  switch (o) {
    case RunOutcome::Completed: return "completed";
    case RunOutcome::FellOver: return "fell over";
    case RunOutcome::TrackExceeded: return "track exceeded";
  }
  return "?";
}

struct RunResult {
  TimeSeries series;
  RunOutcome outcome = RunOutcome::Completed;
  double end_time = 0.0;  // time of the last integrated state
};

namespace detail {

struct ControllerState {
  CascadeMemory cascade;
  EmbeddedCascadeMemory embedded;
  Eigen::RowVector4d lqr_k = Eigen::RowVector4d::Zero();
  double force = 0.0;
  double theta_sp = 0.0;
};

}  // namespace detail

// Fixed-step closed-loop simulation. Controllers run at their own sample
// instants with zero-order hold; the trace records every dt. Physical
// failure (fall past pi/2, leaving the track) ends the run with an
// outcome, not an error; the violating state is appended so the failure
// instant is visible.
inline RunResult run_scenario(const Scenario& sc) {
  sc.validate();
  std::mt19937 rng(sc.seed);

  detail::ControllerState ctl;
  if (const auto* h = std::get_if<HybridConfig>(&sc.controller))
    ctl.lqr_k = lqr_gain(linearize(sc.plant), h->lqr.Q, h->lqr.R);

  const long steps = static_cast<long>(std::llround(sc.duration / sc.dt));
  const long ctl_every = static_cast<long>(std::llround(sc.controller_period() / sc.dt));
  const long sonar_every =
      static_cast<long>(std::llround(sc.sensors.ultrasonic.sample_period / sc.dt));
  const bool hw = sc.sensing == SensingMode::HardwareEmulated;

  RunResult res;
  res.series.reserve(static_cast<std::size_t>(steps));

  State s = sc.initial;
  double sonar_held = 0.0;
  double measured_x = s.x;
  double measured_theta = s.theta;

  auto record = [&](double t, double d) {
    res.series.push_row(t, s.x, s.v, s.theta, s.omega, ctl.theta_sp, ctl.force,
                        d, measured_x, measured_theta);
  };

  for (long k = 0; k < steps; ++k) {
    const double t = k * sc.dt;
    if (hw && k % sonar_every == 0)
      sonar_held = measure_position(sc.sensors.ultrasonic, s.x, rng);
    measured_x = hw ? sonar_held : s.x;
    measured_theta =
        hw ? decode_angle(sc.sensors.encoder, encode_angle(sc.sensors.encoder, s.theta))
           : s.theta;

    if (k % ctl_every == 0) {
      const double x_ref = sc.reference(t);
      if (const auto* c = std::get_if<CascadeConfig>(&sc.controller)) {
        const CascadeResult r =
            cascade_step(*c, ctl.cascade, x_ref, measured_x, measured_theta);
        ctl.cascade = r.memory;
        ctl.force = r.force;
        ctl.theta_sp = r.theta_setpoint;
      } else if (const auto* h = std::get_if<HybridConfig>(&sc.controller)) {
        const State meas{measured_x, s.v, measured_theta, s.omega};
        ctl.force = hybrid_step(*h, ctl.lqr_k, x_ref, meas);
        ctl.theta_sp = 0.0;
      } else {
        const auto& e = std::get<EmbeddedCascadeConfig>(sc.controller);
        const EmbeddedCascadeResult r = embedded_cascade_step(
            e, ctl.embedded, x_ref, measured_x, measured_theta);
        ctl.embedded = r.memory;
        ctl.force = r.force;
        ctl.theta_sp = r.theta_setpoint;
      }
    }

    const double d = sc.disturbance(t);
    record(t, d);

    if (sc.disturbance_target == DisturbanceTarget::Cart) {
      s = step(sc.plant, s, ctl.force, d, sc.dt);
    } else {
      s = rk4_step(sc.plant, s, ctl.force, sc.dt, d, sc.plant.lc);
      if (!std::isfinite(s.x) || !std::isfinite(s.theta))
        throw IntegrationError("non-finite state in scenario " + sc.name);
    }
    res.end_time = (k + 1) * sc.dt;

    if (std::abs(s.theta) > M_PI / 2.0) {
      res.outcome = RunOutcome::FellOver;
      record(res.end_time, d);
      return res;
    }
    if (sc.track_half_length && std::abs(s.x) > *sc.track_half_length) {
      res.outcome = RunOutcome::TrackExceeded;
      record(res.end_time, d);
      return res;
    }
  }
  return res;
}

// Reported run status: physical failures from the runner, otherwise
// settled/not-settled from the metrics.
enum class Outcome { Settled, NotSettled, FellOver, TrackExceeded };

inline const char* to_string(Outcome o) {
  switch (o) {
    case Outcome::Settled: return "settled";
    case Outcome::NotSettled: return "not settled";
    case Outcome::FellOver: return "fell over";
    case Outcome::TrackExceeded: return "track exceeded";
  }
  return "?";
}

struct Report {
  std::string scenario;
  Outcome outcome = Outcome::NotSettled;
  Metrics metrics;
  double reference_final = 0.0;
};

inline double controller_force_limit(const Scenario& sc) {
  if (const auto* c = std::get_if<CascadeConfig>(&sc.controller))
    return c->angle_pid.out_max;
  if (const auto* h = std::get_if<HybridConfig>(&sc.controller))
    return h->lqr.force_max;
  const auto& e = std::get<EmbeddedCascadeConfig>(sc.controller);
  return e.motor.pwm_full_scale * e.motor.force_per_pwm;
}

inline Report make_report(const Scenario& sc, const RunResult& run) {
  Report rep;
  rep.scenario = sc.name;
  rep.reference_final = sc.reference.final_value();
  rep.metrics = compute_metrics(run.series, rep.reference_final, 0.02,
                                controller_force_limit(sc));
  switch (run.outcome) {
    case RunOutcome::FellOver:
      rep.outcome = Outcome::FellOver;
      break;
    case RunOutcome::TrackExceeded:
      rep.outcome = Outcome::TrackExceeded;
      rep.metrics.track_violation = true;
      break;
    case RunOutcome::Completed:
      rep.outcome = rep.metrics.settled() ? Outcome::Settled : Outcome::NotSettled;
      break;
  }
  return rep;
}

}  // namespace cartpole
