#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "cartpole/metrics.hpp"

using namespace cartpole;

namespace {

// Analytic unit step response of a standard second-order system.
TimeSeries second_order_step(double zeta, double wn, double T, double dt) {
  TimeSeries s;
  for (double t = 0.0; t <= T; t += dt) {
    double y;
    if (zeta < 1.0) {
      const double wd = wn * std::sqrt(1.0 - zeta * zeta);
      y = 1.0 - std::exp(-zeta * wn * t) *
                    (std::cos(wd * t) + zeta / std::sqrt(1.0 - zeta * zeta) * std::sin(wd * t));
    } else {
      y = 1.0 - std::exp(-wn * t) * (1.0 + wn * t);  // critically damped
    }
    s.push_row(t, y, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, y, 0.0);
  }
  return s;
}

}  // namespace

TEST_CASE("critically damped step has zero overshoot") {
  const TimeSeries s = second_order_step(1.0, 2.0, 20.0, 1e-3);
  const Metrics m = compute_metrics(s, 1.0);
  REQUIRE(m.percent_overshoot.has_value());
  CHECK(*m.percent_overshoot == 0.0);
  CHECK(m.settled());
}

TEST_CASE("underdamped overshoot matches the closed form") {
  for (const double zeta : {0.3, 0.5, 0.7}) {
    const TimeSeries s = second_order_step(zeta, 2.0, 30.0, 1e-4);
    const Metrics m = compute_metrics(s, 1.0);
    const double expect = std::exp(-M_PI * zeta / std::sqrt(1.0 - zeta * zeta)) * 100.0;
    REQUIRE(m.percent_overshoot.has_value());
    CHECK(*m.percent_overshoot == Catch::Approx(expect).margin(0.5));
  }
}

TEST_CASE("metrics are invariant to a uniform time shift") {
  const TimeSeries s = second_order_step(0.5, 2.0, 30.0, 1e-3);
  TimeSeries shifted = s;
  for (double& t : shifted.t) t += 123.0;
  const Metrics a = compute_metrics(s, 1.0);
  const Metrics b = compute_metrics(shifted, 1.0);
  CHECK(*a.settling_time == Catch::Approx(*b.settling_time).margin(1e-12));
  CHECK(*a.percent_overshoot == *b.percent_overshoot);
  CHECK(*a.rise_time == Catch::Approx(*b.rise_time).margin(1e-12));
}

TEST_CASE("appending settled samples does not change the settling time") {
  TimeSeries s = second_order_step(0.5, 2.0, 30.0, 1e-3);
  const Metrics before = compute_metrics(s, 1.0);
  for (int i = 1; i <= 5000; ++i)
    s.push_row(30.0 + i * 1e-3, 1.0, 0, 0, 0, 0, 0, 0, 1.0, 0);
  const Metrics after = compute_metrics(s, 1.0);
  CHECK(*before.settling_time == Catch::Approx(*after.settling_time).margin(1e-12));
}

TEST_CASE("constant trace at the reference settles at zero") {
  TimeSeries s;
  for (int i = 0; i < 3; ++i) s.push_row(i * 0.1, 0.25, 0, 0, 0, 0, 0, 0, 0.25, 0);
  const Metrics m = compute_metrics(s, 0.25);
  REQUIRE(m.settling_time.has_value());
  CHECK(*m.settling_time == 0.0);
  CHECK_FALSE(m.percent_overshoot.has_value());  // zero-height step
}

TEST_CASE("a trace ending outside the band is not settled") {
  TimeSeries s;
  for (int i = 0; i <= 100; ++i) s.push_row(i * 0.01, 0.5, 0, 0, 0, 0, 0, 0, 0.5, 0);
  const Metrics m = compute_metrics(s, 1.0);
  CHECK_FALSE(m.settled());
}

TEST_CASE("undershoot captures motion opposite the command") {
  TimeSeries s;
  // step 0 -> 1 with an initial dip to -0.04 at t = 0.5
  for (int i = 0; i <= 1000; ++i) {
    const double t = i * 0.01;
    const double x = t <= 0.5 ? -0.08 * t : 1.0 - std::exp(-(t - 0.5));
    s.push_row(t, x, 0, 0, 0, 0, 0, 0, x, 0);
  }
  const Metrics m = compute_metrics(s, 1.0);
  CHECK(m.undershoot == Catch::Approx(0.04).margin(1e-6));
}

TEST_CASE("saturation duty counts samples at the limit") {
  TimeSeries s;
  for (int i = 0; i < 100; ++i)
    s.push_row(i * 0.01, 0.0, 0, 0, 0, 0, i < 25 ? 12.0 : 3.0, 0, 0, 0);
  const Metrics m = compute_metrics(s, 0.0, 0.02, 12.0);
  CHECK(m.saturation_duty_pct == Catch::Approx(25.0));
}

TEST_CASE("empty series is rejected") {
  CHECK_THROWS_AS(compute_metrics(TimeSeries{}, 0.0), std::invalid_argument);
}
