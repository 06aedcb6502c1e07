#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>

#include "cartpole/series.hpp"

namespace cartpole {

// Transient metrics of a cart-position trace against a step reference.
//
// Settling uses a band of half-width `band * scale` around the final
// reference, where scale is the step height for stepped references and
// the peak deviation |x - ref| for zero-step (disturbance recovery)
// traces. Times are reported from the step onset (the first sample).
struct Metrics {
  std::optional<double> percent_overshoot;  // absent for zero-height steps
  double undershoot = 0.0;                  // m, excursion opposite the command
  double peak_angle_deg = 0.0;              // max |theta|
  std::optional<double> settling_time;      // absent = never permanently in band
  std::optional<double> rise_time;          // 10% -> 90% of the step
  double steady_state_error = 0.0;          // mean over the last 10% of samples
  double max_abs_x = 0.0;
  double saturation_duty_pct = 0.0;         // % of steps with |force| at the limit
  bool track_violation = false;

  bool settled() const { return settling_time.has_value(); }
};

inline Metrics compute_metrics(const TimeSeries& s, double reference_final,
                               double band = 0.02, double force_limit = 12.0) {
  if (s.empty()) throw std::invalid_argument("compute_metrics: empty series");
  Metrics m;
  const double onset = s.t.front();
  const double x0 = s.x.front();
  const double step_height = reference_final - x0;
  const std::size_t n = s.size();

  double peak_dev = 0.0;
  double x_min = std::numeric_limits<double>::infinity();
  double x_max = -std::numeric_limits<double>::infinity();
  double peak_angle = 0.0;
  std::size_t saturated = 0;
  for (std::size_t i = 0; i < n; ++i) {
    peak_dev = std::max(peak_dev, std::abs(s.x[i] - reference_final));
    x_min = std::min(x_min, s.x[i]);
    x_max = std::max(x_max, s.x[i]);
    peak_angle = std::max(peak_angle, std::abs(s.theta[i]));
    m.max_abs_x = std::max(m.max_abs_x, std::abs(s.x[i]));
    if (std::abs(s.force[i]) >= force_limit * (1.0 - 1e-9)) ++saturated;
  }
  m.peak_angle_deg = peak_angle * 180.0 / M_PI;
  m.saturation_duty_pct = 100.0 * static_cast<double>(saturated) / n;

  if (step_height > 0.0) {
    m.percent_overshoot = std::max(0.0, (x_max - reference_final) / step_height * 100.0);
    m.undershoot = std::max(0.0, x0 - x_min);
  } else if (step_height < 0.0) {
    m.percent_overshoot = std::max(0.0, (reference_final - x_min) / -step_height * 100.0);
    m.undershoot = std::max(0.0, x_max - x0);
  }

  // Settling: last sample outside the band, measured from onset. A trace
  // that ends outside the band never settled.
  const double scale = step_height != 0.0 ? std::abs(step_height) : peak_dev;
  const double half_width = band * scale;
  std::optional<double> last_outside;
  for (std::size_t i = 0; i < n; ++i)
    if (std::abs(s.x[i] - reference_final) > half_width) last_outside = s.t[i];
  if (!last_outside) {
    m.settling_time = 0.0;
  } else if (*last_outside < s.t.back()) {
    m.settling_time = *last_outside - onset;
  }  // else: still outside at the end -> not settled

  if (step_height != 0.0) {
    const double lo = x0 + 0.1 * step_height;
    const double hi = x0 + 0.9 * step_height;
    std::optional<double> t10, t90;
    for (std::size_t i = 0; i < n; ++i) {
      const bool past10 = step_height > 0.0 ? s.x[i] >= lo : s.x[i] <= lo;
      const bool past90 = step_height > 0.0 ? s.x[i] >= hi : s.x[i] <= hi;
      if (past10 && !t10) t10 = s.t[i];
      if (past90 && !t90) t90 = s.t[i];
    }
    if (t10 && t90 && *t90 >= *t10) m.rise_time = *t90 - *t10;
  }

  const std::size_t tail = std::max<std::size_t>(1, n / 10);
  double acc = 0.0;
  for (std::size_t i = n - tail; i < n; ++i) acc += s.x[i];
  m.steady_state_error = acc / tail - reference_final;

  return m;
}

}  // namespace cartpole
