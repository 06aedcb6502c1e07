#pragma once

#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "cartpole/catalog.hpp"
#include "cartpole/scenario.hpp"

namespace cartpole {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace cfg {

using nlohmann::json;

inline double num(const json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number()) throw ConfigError(std::string(key) + " must be a number");
  return j.at(key).get<double>();
}

inline PidGains pid_from_json(const json& j, const PidGains& base) {
  PidGains g = base;
  g.kp = num(j, "kp", g.kp);
  g.ki = num(j, "ki", g.ki);
  g.kd = num(j, "kd", g.kd);
  g.filter_n = num(j, "filter_n", g.filter_n);
  g.out_min = num(j, "out_min", g.out_min);
  g.out_max = num(j, "out_max", g.out_max);
  g.ts = num(j, "ts", g.ts);
  return g;
}

inline json pid_to_json(const PidGains& g) {
  return json{{"kp", g.kp},       {"ki", g.ki},           {"kd", g.kd},
              {"filter_n", g.filter_n}, {"out_min", g.out_min},
              {"out_max", g.out_max},   {"ts", g.ts}};
}

inline EmbeddedPidGains embedded_pid_from_json(const json& j,
                                               const EmbeddedPidGains& base) {
  EmbeddedPidGains g = base;
  g.kp = num(j, "kp", g.kp);
  g.ki = num(j, "ki", g.ki);
  g.kd = num(j, "kd", g.kd);
  g.sample_period = num(j, "ts", g.sample_period);
  g.out_min = num(j, "out_min", g.out_min);
  g.out_max = num(j, "out_max", g.out_max);
  return g;
}

inline PlantParams plant_from_json(const json& j) {
  const double M = num(j, "cart_mass", 0.5672);
  const double m = num(j, "pendulum_mass", 0.0374);
  const double l = num(j, "length", 0.38);
  const double g = num(j, "gravity", 9.81);
  const double b = num(j, "friction", 0.0);
  // rod-recomputed lc and I unless explicitly overridden
  const double lc = num(j, "com_distance", l / 2.0);
  const double I = num(j, "inertia", m * l * l / 12.0);
  return PlantParams(M, m, l, lc, I, g, b);
}

inline json plant_to_json(const PlantParams& p) {
  return json{{"cart_mass", p.M}, {"pendulum_mass", p.m}, {"length", p.l},
              {"com_distance", p.lc}, {"inertia", p.I},   {"gravity", p.g},
              {"friction", p.b}};
}

inline Signal signal_from_json(const json& j, const char* what) {
  if (j.is_number()) return Signal::step(j.get<double>());
  if (!j.is_array()) throw ConfigError(std::string(what) + " must be a number or [[t, value], ...]");
  std::vector<std::pair<double, double>> segs;
  for (const auto& seg : j) {
    if (!seg.is_array() || seg.size() != 2)
      throw ConfigError(std::string(what) + " segments must be [t, value] pairs");
    segs.emplace_back(seg[0].get<double>(), seg[1].get<double>());
  }
  return Signal(std::move(segs));
}

inline json signal_to_json(const Signal& s) {
  json arr = json::array();
  for (const auto& [t, v] : s.segments()) arr.push_back(json::array({t, v}));
  return arr;
}

inline Scenario scenario_from_json(const json& j) {
  Scenario sc;
  if (j.contains("scenario")) {
    sc = find_scenario(j.at("scenario").get<std::string>());
  } else {
    sc.name = j.value("name", std::string("custom"));
    sc.description = j.value("description", std::string());
  }
  if (j.contains("plant")) sc.plant = plant_from_json(j.at("plant"));
  if (j.contains("controller")) {
    const json& c = j.at("controller");
    const std::string type = c.value("type", std::string("cascade"));
    if (type == "cascade") {
      CascadeConfig cfg =
          std::holds_alternative<CascadeConfig>(sc.controller)
              ? std::get<CascadeConfig>(sc.controller)
              : baseline_cascade();
      if (c.contains("position")) cfg.position_pid = pid_from_json(c.at("position"), cfg.position_pid);
      if (c.contains("angle")) cfg.angle_pid = pid_from_json(c.at("angle"), cfg.angle_pid);
      cfg.angle_setpoint_limit = num(c, "angle_setpoint_limit", cfg.angle_setpoint_limit);
      sc.controller = cfg;
    } else if (type == "hybrid") {
      HybridConfig h;
      if (std::holds_alternative<HybridConfig>(sc.controller))
        h = std::get<HybridConfig>(sc.controller);
      else {
        h.lqr.Q = lqr_weight_q();
        h.lqr.R = 0.001;
      }
      if (c.contains("q_diag")) {
        const auto& q = c.at("q_diag");
        if (!q.is_array() || q.size() != 4) throw ConfigError("q_diag must have 4 entries");
        h.lqr.Q.setZero();
        for (int i = 0; i < 4; ++i) h.lqr.Q(i, i) = q[static_cast<std::size_t>(i)].get<double>();
      }
      h.lqr.R = num(c, "r", h.lqr.R);
      h.lqr.force_min = num(c, "force_min", h.lqr.force_min);
      h.lqr.force_max = num(c, "force_max", h.lqr.force_max);
      h.lqr.ts = num(c, "ts", h.lqr.ts);
      h.x_error_limit = num(c, "x_error_limit", h.x_error_limit);
      sc.controller = h;
    } else if (type == "embedded") {
      EmbeddedCascadeConfig e =
          std::holds_alternative<EmbeddedCascadeConfig>(sc.controller)
              ? std::get<EmbeddedCascadeConfig>(sc.controller)
              : experimental_cascade();
      if (c.contains("position")) e.position_pid = embedded_pid_from_json(c.at("position"), e.position_pid);
      if (c.contains("angle")) e.angle_pid = embedded_pid_from_json(c.at("angle"), e.angle_pid);
      e.motor.pwm_full_scale = num(c, "pwm_full_scale", e.motor.pwm_full_scale);
      e.motor.deadband_floor = num(c, "deadband_floor", e.motor.deadband_floor);
      e.motor.force_per_pwm = num(c, "force_per_pwm", e.motor.force_per_pwm);
      sc.controller = e;
    } else {
      throw ConfigError("unknown controller type: " + type);
    }
  }
  if (j.contains("sensing")) {
    const json& s = j.at("sensing");
    const std::string mode = s.value("mode", std::string("ideal"));
    if (mode == "ideal") {
      sc.sensing = SensingMode::Ideal;
    } else if (mode == "hardware") {
      sc.sensing = SensingMode::HardwareEmulated;
      if (s.contains("encoder"))
        sc.sensors.encoder.pulses_per_rev =
            static_cast<int>(num(s.at("encoder"), "pulses_per_rev", sc.sensors.encoder.pulses_per_rev));
      if (s.contains("ultrasonic")) {
        const json& u = s.at("ultrasonic");
        sc.sensors.ultrasonic.noise_std = num(u, "noise_std", sc.sensors.ultrasonic.noise_std);
        sc.sensors.ultrasonic.resolution = num(u, "resolution", sc.sensors.ultrasonic.resolution);
        sc.sensors.ultrasonic.sample_period = num(u, "sample_period", sc.sensors.ultrasonic.sample_period);
      }
    } else {
      throw ConfigError("unknown sensing mode: " + mode);
    }
  }
  if (j.contains("reference")) sc.reference = signal_from_json(j.at("reference"), "reference");
  if (j.contains("disturbance")) {
    const json& d = j.at("disturbance");
    if (d.is_object()) {
      sc.disturbance = signal_from_json(d.at("signal"), "disturbance");
      const std::string tgt = d.value("target", std::string("cart"));
      if (tgt == "cart") sc.disturbance_target = DisturbanceTarget::Cart;
      else if (tgt == "pendulum") sc.disturbance_target = DisturbanceTarget::PendulumCom;
      else throw ConfigError("unknown disturbance target: " + tgt);
    } else {
      sc.disturbance = signal_from_json(d, "disturbance");
    }
  }
  if (j.contains("initial")) {
    const auto& s0 = j.at("initial");
    if (!s0.is_array() || s0.size() != 4)
      throw ConfigError("initial must be [x, v, theta, omega]");
    sc.initial = State{s0[0].get<double>(), s0[1].get<double>(),
                       s0[2].get<double>(), s0[3].get<double>()};
  }
  sc.duration = num(j, "duration", sc.duration);
  sc.dt = num(j, "dt", sc.dt);
  if (j.contains("track_half_length")) sc.track_half_length = j.at("track_half_length").get<double>();
  if (j.contains("seed")) sc.seed = j.at("seed").get<std::uint32_t>();
  sc.validate();
  return sc;
}

inline json scenario_to_json(const Scenario& sc) {
  json j;
  j["name"] = sc.name;
  j["plant"] = plant_to_json(sc.plant);
  if (const auto* c = std::get_if<CascadeConfig>(&sc.controller)) {
    j["controller"] = json{{"type", "cascade"},
                           {"position", pid_to_json(c->position_pid)},
                           {"angle", pid_to_json(c->angle_pid)},
                           {"angle_setpoint_limit", c->angle_setpoint_limit}};
  } else if (const auto* h = std::get_if<HybridConfig>(&sc.controller)) {
    j["controller"] = json{{"type", "hybrid"},
                           {"q_diag", {h->lqr.Q(0, 0), h->lqr.Q(1, 1), h->lqr.Q(2, 2), h->lqr.Q(3, 3)}},
                           {"r", h->lqr.R},
                           {"force_min", h->lqr.force_min},
                           {"force_max", h->lqr.force_max},
                           {"ts", h->lqr.ts},
                           {"x_error_limit", h->x_error_limit}};
  } else {
    const auto& e = std::get<EmbeddedCascadeConfig>(sc.controller);
    auto emb = [](const EmbeddedPidGains& g) {
      return json{{"kp", g.kp}, {"ki", g.ki}, {"kd", g.kd}, {"ts", g.sample_period},
                  {"out_min", g.out_min}, {"out_max", g.out_max}};
    };
    j["controller"] = json{{"type", "embedded"},
                           {"position", emb(e.position_pid)},
                           {"angle", emb(e.angle_pid)},
                           {"pwm_full_scale", e.motor.pwm_full_scale},
                           {"deadband_floor", e.motor.deadband_floor},
                           {"force_per_pwm", e.motor.force_per_pwm}};
  }
  j["sensing"] = sc.sensing == SensingMode::Ideal
                     ? json{{"mode", "ideal"}}
                     : json{{"mode", "hardware"},
                            {"encoder", {{"pulses_per_rev", sc.sensors.encoder.pulses_per_rev}}},
                            {"ultrasonic",
                             {{"noise_std", sc.sensors.ultrasonic.noise_std},
                              {"resolution", sc.sensors.ultrasonic.resolution},
                              {"sample_period", sc.sensors.ultrasonic.sample_period}}}};
  j["reference"] = signal_to_json(sc.reference);
  j["disturbance"] = json{{"signal", signal_to_json(sc.disturbance)},
                          {"target", sc.disturbance_target == DisturbanceTarget::Cart
                                         ? "cart" : "pendulum"}};
  j["initial"] = {sc.initial.x, sc.initial.v, sc.initial.theta, sc.initial.omega};
  j["duration"] = sc.duration;
  j["dt"] = sc.dt;
  if (sc.track_half_length) j["track_half_length"] = *sc.track_half_length;
  j["seed"] = sc.seed;
  return j;
}

inline json load_json_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config: " + path);
  try {
    return json::parse(f);
  } catch (const json::exception& e) {
    throw ConfigError("parse error in " + path + ": " + e.what());
  }
}

inline Scenario load_scenario_file(const std::string& path) {
  try {
    return scenario_from_json(load_json_file(path));
  } catch (const json::exception& e) {
    throw ConfigError("bad config " + path + ": " + e.what());
  }
}

}  // namespace cfg
}  // namespace cartpole
