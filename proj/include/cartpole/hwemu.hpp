#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>

#include "cartpole/pid.hpp"

namespace cartpole {

// Quadrature encoder on the pendulum pivot. Upright = 0 pulses,
// counterclockwise positive; hanging down = -pulses_per_rev/2.
struct EncoderModel {
  int pulses_per_rev = 2400;

  void validate() const {
    if (pulses_per_rev <= 0) throw std::invalid_argument("encoder ppr must be > 0");
  }
};

inline long encode_angle(const EncoderModel& e, double theta) {
  return std::lround(theta * e.pulses_per_rev / (2.0 * M_PI));
}

inline double decode_angle(const EncoderModel& e, long pulses) {
  return pulses * 2.0 * M_PI / e.pulses_per_rev;
}

// Ultrasonic range sensor: gaussian noise then quantization, sampled at
// its own period and held in between. Deterministic for a fixed seed.
struct UltrasonicModel {
  double noise_std = 0.003;     // m
  double resolution = 0.003;    // m
  double sample_period = 0.02;  // s

  void validate() const {
    if (noise_std < 0.0) throw std::invalid_argument("ultrasonic noise must be >= 0");
    if (!(resolution > 0.0)) throw std::invalid_argument("ultrasonic resolution must be > 0");
    if (!(sample_period > 0.0)) throw std::invalid_argument("ultrasonic period must be > 0");
  }
};

// Round half away from zero, matching the documented half-up rule.
inline double quantize_half_up(double value, double resolution) {
  return std::round(value / resolution) * resolution;
}

inline double measure_position(const UltrasonicModel& u, double true_x,
                               std::mt19937& rng) {
  double x = true_x;
  if (u.noise_std > 0.0) {
    std::normal_distribution<double> n(0.0, u.noise_std);
    x += n(rng);
  }
  return quantize_half_up(x, u.resolution);
}

// PWM drive: the controller's [-255, 255] output is remapped so nonzero
// commands land in [50, 255] counts (below 50 the drivetrain does not
// move), sign giving direction. Zero stays zero so the motor can rest.
struct MotorModel {
  double pwm_full_scale = 255.0;
  double deadband_floor = 50.0;
  double force_per_pwm = 12.0 / 255.0;  // N per count

  void validate() const {
    if (!(pwm_full_scale > 0.0)) throw std::invalid_argument("pwm full scale must be > 0");
    if (!(deadband_floor >= 0.0) || !(deadband_floor < pwm_full_scale))
      throw std::invalid_argument("deadband floor must be in [0, full scale)");
    if (!(force_per_pwm > 0.0)) throw std::invalid_argument("force per pwm must be > 0");
  }
};

inline int remap_pwm(const MotorModel& m, double u) {
  u = saturate(u, -m.pwm_full_scale, m.pwm_full_scale);
  if (u == 0.0) return 0;
  const double mag = m.deadband_floor +
                     std::abs(u) * (m.pwm_full_scale - m.deadband_floor) /
                         m.pwm_full_scale;
  const int count = static_cast<int>(std::floor(mag + 0.5));  // half-up
  return u > 0.0 ? count : -count;
}

inline double pwm_to_force(const MotorModel& m, int command) {
  return command * m.force_per_pwm;
}

// Embedded PID library semantics: error = setpoint - measurement,
// positive gains only, no derivative filter, derivative on the
// measurement (no setpoint kick), integral and output clamped to the
// limits.
struct EmbeddedPidGains {
  double kp = 0.0;
  double ki = 0.0;
  double kd = 0.0;
  double sample_period = 0.005;  // s
  double out_min = -255.0;
  double out_max = 255.0;

  void validate() const {
    if (kp < 0.0 || ki < 0.0 || kd < 0.0)
      throw std::invalid_argument(
          "embedded pid gains must be non-negative (the built-in library "
          "accepts positive gains only)");
    if (!(sample_period > 0.0)) throw std::invalid_argument("embedded pid period must be > 0");
    if (!(out_min < out_max)) throw std::invalid_argument("embedded pid limits inverted");
  }
};

struct EmbeddedPidMemory {
  double integral = 0.0;
  double prev_measurement = 0.0;
  bool primed = false;  // first call seeds prev_measurement
};

struct EmbeddedPidResult {
  double output;
  EmbeddedPidMemory memory;
};

inline EmbeddedPidResult embedded_pid_step(const EmbeddedPidGains& g,
                                           const EmbeddedPidMemory& mem,
                                           double setpoint,
                                           double measurement) {
  if (!std::isfinite(setpoint) || !std::isfinite(measurement))
    throw std::invalid_argument("non-finite embedded pid input");
  EmbeddedPidMemory m = mem;
  const double e = setpoint - measurement;
  m.integral = saturate(m.integral + g.ki * e * g.sample_period, g.out_min, g.out_max);
  const double d =
      m.primed ? -g.kd * (measurement - m.prev_measurement) / g.sample_period : 0.0;
  m.prev_measurement = measurement;
  m.primed = true;
  const double out = saturate(g.kp * e + m.integral + d, g.out_min, g.out_max);
  return {out, m};
}

// The emulated rig's cascade: position loop in centimetres producing an
// angle setpoint in degrees, angle loop in degrees producing a PWM
// command. The motor wiring negates the angle-loop output (the one
// polarity that stabilizes with positive-only gains).
struct EmbeddedCascadeConfig {
  EmbeddedPidGains position_pid{0.1945, 0.0, 0.000357, 0.005, -10.0, 10.0};
  EmbeddedPidGains angle_pid{30.0, 28.6, 0.1, 0.005, -255.0, 255.0};
  MotorModel motor;

  void validate() const {
    position_pid.validate();
    angle_pid.validate();
    motor.validate();
    if (angle_pid.sample_period > position_pid.sample_period + 1e-12)
      throw std::invalid_argument("embedded angle loop must be at least as fast as the position loop");
  }
};

struct EmbeddedCascadeMemory {
  EmbeddedPidMemory position;
  EmbeddedPidMemory angle;
  double theta_setpoint_deg = 0.0;
  long step = 0;
};

struct EmbeddedCascadeResult {
  double force;            // N, after remap and PWM-to-force
  int pwm_command;         // signed motor counts
  double theta_setpoint;   // rad, for the trace
  EmbeddedCascadeMemory memory;
};

inline EmbeddedCascadeResult embedded_cascade_step(
    const EmbeddedCascadeConfig& cfg, const EmbeddedCascadeMemory& mem,
    double x_ref_m, double x_meas_m, double theta_meas_rad) {
  EmbeddedCascadeMemory m = mem;
  const long outer_every = static_cast<long>(
      std::llround(cfg.position_pid.sample_period / cfg.angle_pid.sample_period));
  if (m.step % outer_every == 0) {
    const EmbeddedPidResult pr = embedded_pid_step(
        cfg.position_pid, m.position, x_ref_m * 100.0, x_meas_m * 100.0);
    m.position = pr.memory;
    m.theta_setpoint_deg = pr.output;
  }
  const double theta_meas_deg = theta_meas_rad * 180.0 / M_PI;
  const EmbeddedPidResult ar = embedded_pid_step(cfg.angle_pid, m.angle,
                                                 m.theta_setpoint_deg,
                                                 theta_meas_deg);
  m.angle = ar.memory;
  m.step += 1;
  const int cmd = remap_pwm(cfg.motor, -ar.output);
  return {pwm_to_force(cfg.motor, cmd), cmd,
          m.theta_setpoint_deg * M_PI / 180.0, m};
}

}  // namespace cartpole
