#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cartpole {

// Discrete parallel-form PID. The derivative acts on the error through a
// first-order filter kd N s/(s+N) discretized by backward Euler;
// filter_n = 0 selects the raw difference quotient instead. The integral
// advances by forward Euler and is clamped to the output limits
// (anti-windup), as is the summed output.
struct PidGains {
  double kp = 0.0;
  double ki = 0.0;
  double kd = 0.0;
  double filter_n = 0.0;  // 1/s; 0 means unfiltered derivative
  double out_min = -1.0;
  double out_max = 1.0;
  double ts = 1e-3;  // sample period (s)

  void validate() const {
    if (!(out_min < out_max)) throw std::invalid_argument("out_min must be < out_max");
    if (!(ts > 0.0)) throw std::invalid_argument("pid sample period must be > 0");
    if (!(filter_n >= 0.0)) throw std::invalid_argument("filter_n must be >= 0");
  }
};

struct PidMemory {
  double integral = 0.0;
  double deriv = 0.0;       // filtered derivative state
  double prev_error = 0.0;
  double prev_output = 0.0;
};

struct PidResult {
  double output;
  PidMemory memory;
};

inline double saturate(double u, double lo, double hi) {
  return std::min(std::max(u, lo), hi);
}

// One controller step on a precomputed error.
inline PidResult pid_step_error(const PidGains& g, const PidMemory& mem,
                                double error) {
  if (!std::isfinite(error)) throw std::invalid_argument("non-finite pid input");
  PidMemory m = mem;
  const double p = g.kp * error;
  m.integral = saturate(m.integral + g.ki * error * g.ts, g.out_min, g.out_max);
  if (g.filter_n == 0.0) {
    m.deriv = g.kd * (error - m.prev_error) / g.ts;
  } else {
    m.deriv = (m.deriv + g.kd * g.filter_n * (error - m.prev_error)) /
              (1.0 + g.filter_n * g.ts);
  }
  m.prev_error = error;
  const double out = saturate(p + m.integral + m.deriv, g.out_min, g.out_max);
  m.prev_output = out;
  return {out, m};
}

inline PidResult pid_step(const PidGains& g, const PidMemory& mem,
                          double setpoint, double measurement) {
  if (!std::isfinite(setpoint) || !std::isfinite(measurement))
    throw std::invalid_argument("non-finite pid input");
  return pid_step_error(g, mem, setpoint - measurement);
}

// Cascade position->angle->force controller. The outer loop turns cart
// position error into a pendulum lean setpoint (clamped to
// +-angle_setpoint_limit); the inner loop turns angle error into force.
// Both loop errors are formed as measurement - reference: with the
// benchmark gain signs (negative position gains, positive angle gains)
// this is the stabilizing sense and yields the characteristic initial
// backward motion of the cart on a forward step.
struct CascadeConfig {
  PidGains position_pid;  // m error -> rad setpoint
  PidGains angle_pid;     // rad error -> N
  double angle_setpoint_limit = 0.10;  // rad

  void validate() const {
    position_pid.validate();
    angle_pid.validate();
    if (!(angle_setpoint_limit > 0.0))
      throw std::invalid_argument("angle setpoint limit must be > 0");
    if (angle_pid.ts > position_pid.ts + 1e-12)
      throw std::invalid_argument("inner (angle) loop must be at least as fast as the outer loop");
    const double ratio = position_pid.ts / angle_pid.ts;
    if (std::abs(ratio - std::round(ratio)) > 1e-9)
      throw std::invalid_argument("outer loop period must be a multiple of the inner period");
  }
};

struct CascadeMemory {
  PidMemory position;
  PidMemory angle;
  double theta_setpoint = 0.0;  // held between outer-loop updates
  long step = 0;                // inner-loop tick counter
};

struct CascadeResult {
  double force;
  double theta_setpoint;
  CascadeMemory memory;
};

// One inner-loop tick. The outer loop fires every
// position_pid.ts / angle_pid.ts ticks and its output is held in between.
inline CascadeResult cascade_step(const CascadeConfig& cfg,
                                  const CascadeMemory& mem, double x_ref,
                                  double x_meas, double theta_meas) {
  CascadeMemory m = mem;
  const long outer_every =
      static_cast<long>(std::llround(cfg.position_pid.ts / cfg.angle_pid.ts));
  if (m.step % outer_every == 0) {
    const PidResult pr = pid_step_error(cfg.position_pid, m.position, x_meas - x_ref);
    m.position = pr.memory;
    m.theta_setpoint = saturate(pr.output, -cfg.angle_setpoint_limit,
                                cfg.angle_setpoint_limit);
  }
  const PidResult ar =
      pid_step_error(cfg.angle_pid, m.angle, theta_meas - m.theta_setpoint);
  m.angle = ar.memory;
  m.step += 1;
  return {ar.output, m.theta_setpoint, m};
}

}  // namespace cartpole
