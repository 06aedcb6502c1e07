#pragma once

#include <cstddef>
#include <vector>

namespace cartpole {

// Columnar closed-loop trace, one row per integration step.
struct TimeSeries {
  std::vector<double> t;
  std::vector<double> x;
  std::vector<double> v;
  std::vector<double> theta;
  std::vector<double> omega;
  std::vector<double> theta_sp;
  std::vector<double> force;
  std::vector<double> disturbance;
  std::vector<double> measured_x;
  std::vector<double> measured_theta;

  std::size_t size() const { return t.size(); }
  bool empty() const { return t.empty(); }

  void reserve(std::size_t n) {
    t.reserve(n); x.reserve(n); v.reserve(n); theta.reserve(n);
    omega.reserve(n); theta_sp.reserve(n); force.reserve(n);
    disturbance.reserve(n); measured_x.reserve(n); measured_theta.reserve(n);
  }

  void push_row(double t_, double x_, double v_, double theta_, double omega_,
                double theta_sp_, double force_, double disturbance_,
                double measured_x_, double measured_theta_) {
    t.push_back(t_); x.push_back(x_); v.push_back(v_); theta.push_back(theta_);
    omega.push_back(omega_); theta_sp.push_back(theta_sp_);
    force.push_back(force_); disturbance.push_back(disturbance_);
    measured_x.push_back(measured_x_); measured_theta.push_back(measured_theta_);
  }
};

}  // namespace cartpole
