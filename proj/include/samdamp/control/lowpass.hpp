#pragma once

#include <cmath>
#include <optional>

#include "samdamp/errors.hpp"

namespace samdamp {

/// First-order low-pass filter 1 / (tau s + 1), discretized exactly for a
/// piecewise-constant input: y+ = a y + (1 - a) u with a = exp(-dt / tau).
///
/// V is double or a fixed-size Eigen vector. The first update seeds the state
/// with the input.
template <class V>
class LowPassFilter {
 public:
  explicit LowPassFilter(double tau) : tau_(tau) {
    if (!(tau > 0.0) || !std::isfinite(tau)) throw ConfigError("tau", "must be a finite value > 0");
  }

  const V& update(const V& input, double dt) {
    if (!(dt > 0.0)) throw ConfigError("dt", "must be > 0");
    if (!state_) {
      state_ = input;
    } else {
      const double a = std::exp(-dt / tau_);
      state_ = V(a * *state_ + (1.0 - a) * input);
    }
    return *state_;
  }

  bool initialized() const { return state_.has_value(); }
  const V& value() const { return *state_; }
  double tau() const { return tau_; }
  void reset() { state_.reset(); }

 private:
  double tau_;
  std::optional<V> state_;
};

}  // namespace samdamp
