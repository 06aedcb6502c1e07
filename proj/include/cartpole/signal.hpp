#pragma once

#include <stdexcept>
#include <utility>
#include <vector>

namespace cartpole {

// Piecewise-constant signal: ordered (start_time, value) segments.
// Evaluation before the first segment yields 0.
class Signal {
 public:
  Signal() = default;

  explicit Signal(std::vector<std::pair<double, double>> segments)
      : segments_(std::move(segments)) {
    for (std::size_t i = 1; i < segments_.size(); ++i)
      if (!(segments_[i - 1].first < segments_[i].first))
        throw std::invalid_argument("signal start times must be strictly increasing");
  }

  static Signal constant(double value) { return Signal({{0.0, value}}); }

  // Step from 0 to `value` at time `at`.
  static Signal step(double value, double at = 0.0) {
    return Signal({{at, value}});
  }

  // `value` over [from, to), zero elsewhere.
  static Signal pulse(double value, double from, double to) {
    return Signal({{from, value}, {to, 0.0}});
  }

  double operator()(double t) const {
    double v = 0.0;
    for (const auto& [start, value] : segments_) {
      if (t < start) break;
      v = value;
    }
    return v;
  }

  double final_value() const {
    return segments_.empty() ? 0.0 : segments_.back().second;
  }

  // Time of the last change, 0 for constant/empty signals. Metrics are
  // reported from this onset.
  double last_change_time() const {
    return segments_.empty() ? 0.0 : segments_.back().first;
  }

  const std::vector<std::pair<double, double>>& segments() const {
    return segments_;
  }

  bool empty() const { return segments_.empty(); }

 private:
  std::vector<std::pair<double, double>> segments_;
};

}  // namespace cartpole
