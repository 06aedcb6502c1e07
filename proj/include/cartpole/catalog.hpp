#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "cartpole/scenario.hpp"

namespace cartpole {

// Baseline simulation cascade gains (angle loop in N per rad, position
// loop in rad per m), with the derivative filters they were tuned with.
inline CascadeConfig baseline_cascade() {
  CascadeConfig cfg;
  cfg.angle_pid = PidGains{204.26, 0.0, 3.70, 75.3, -12.0, 12.0, 1e-3};
  cfg.position_pid = PidGains{-0.03, 0.0, -0.24, 9.48, -0.10, 0.10, 0.1};
  cfg.angle_setpoint_limit = 0.10;
  return cfg;
}

// Experimental (embedded) cascade gains: position loop cm -> deg,
// angle loop deg -> PWM counts.
inline EmbeddedCascadeConfig experimental_cascade() {
  return EmbeddedCascadeConfig{};
}

inline Eigen::Matrix4d lqr_weight_q() {
  Eigen::Matrix4d Q = Eigen::Matrix4d::Zero();
  Q(0, 0) = 1.0;  // x^2
  Q(2, 2) = 2.0;  // 2 theta^2
  return Q;
}

// The six named experiments. S1/S2 are tracking studies on the light
// rod, S3-S5 disturbance-rejection studies (1 N on the rod over 6-7 s),
// S6 the hardware-emulated rig with the experimental gains.
inline std::vector<Scenario> builtin_scenarios() {
  std::vector<Scenario> out;

  Scenario s1;
  s1.name = "S1";
  s1.description = "10 cm step with the baseline cascade gains";
  s1.figure = "Figs. 5-7";
  s1.plant = PlantParams::benchmark();
  s1.controller = baseline_cascade();
  s1.reference = Signal::step(0.10);
  s1.duration = 15.0;
  out.push_back(s1);

  Scenario s2 = s1;
  s2.name = "S2";
  s2.description = "reference sweep 10/20/25/30 cm on a 25 cm half-track";
  s2.figure = "Fig. 10";
  s2.reference = Signal::step(0.30);
  s2.track_half_length = 0.25;
  out.push_back(s2);

  Scenario s3 = s1;
  s3.name = "S3";
  s3.description = "1 N rod disturbance at 6-7 s, light rod (rejection fails)";
  s3.figure = "Fig. 11";
  s3.disturbance = Signal::pulse(1.0, 6.0, 7.0);
  s3.disturbance_target = DisturbanceTarget::PendulumCom;
  s3.track_half_length = 0.25;
  out.push_back(s3);

  Scenario s4;
  s4.name = "S4";
  s4.description = "heavy rod (0.6 kg, 0.5 m), same gains, 1 N rod disturbance";
  s4.figure = "Fig. 12";
  s4.plant = PlantParams::heavy();
  {
    CascadeConfig cfg = baseline_cascade();
    // the heavy rod needs the wider lean to recover within the track
    cfg.angle_setpoint_limit = 0.35;
    cfg.position_pid.out_min = -0.35;
    cfg.position_pid.out_max = 0.35;
    s4.controller = cfg;
  }
  s4.reference = Signal::constant(0.10);
  s4.initial = State{0.10, 0.0, 0.0, 0.0};  // regulation run, no step
  s4.disturbance = Signal::pulse(1.0, 6.0, 7.0);
  s4.disturbance_target = DisturbanceTarget::PendulumCom;
  s4.duration = 40.0;
  s4.track_half_length = 0.80;
  out.push_back(s4);

  Scenario s5 = s4;
  s5.name = "S5";
  s5.description = "S4 with the angle loop replaced by full-state LQR";
  s5.figure = "Fig. 13";
  {
    HybridConfig h;
    h.lqr.Q = lqr_weight_q();
    h.lqr.R = 0.001;
    s5.controller = h;
  }
  out.push_back(s5);

  Scenario s6;
  s6.name = "S6";
  s6.description = "hardware-emulated rig, experimental gains, 7->10 cm";
  s6.figure = "Figs. 8-9";
  s6.plant = PlantParams::benchmark(0.5);  // belt/rail drag
  s6.controller = experimental_cascade();
  s6.sensing = SensingMode::HardwareEmulated;
  s6.reference = Signal::step(0.10);
  s6.initial = State{0.07, 0.0, 8.0 * M_PI / 180.0, 0.0};  // released at ~8 deg
  s6.duration = 15.0;
  s6.seed = 42;
  out.push_back(s6);

  return out;
}

inline Scenario find_scenario(const std::string& name) {
  for (const Scenario& s : builtin_scenarios())
    if (s.name == name) return s;
  throw std::invalid_argument("unknown scenario: " + name);
}

// The reference amplitudes of the S2 sweep family.
inline std::vector<double> s2_sweep_values() { return {0.10, 0.20, 0.25, 0.30}; }

}  // namespace cartpole
