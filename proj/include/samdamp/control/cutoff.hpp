#pragma once

#include <numbers>

#include "samdamp/dynamics/modes.hpp"
#include "samdamp/errors.hpp"

namespace samdamp {

struct FilterCutoff {
  double cutoff_hz = 0.0;
  double tau = 0.0;  ///< 1 / (2 pi cutoff_hz) [s]
};

inline FilterCutoff cutoff_from_hz(double cutoff_hz) {
  if (!(cutoff_hz > 0.0)) throw ConfigError("cutoff_hz", "must be > 0");
  return {cutoff_hz, 1.0 / (2.0 * std::numbers::pi * cutoff_hz)};
}

/// Cutoff midway between the slow and fast pendulum modes.
inline FilterCutoff cutoff_frequency(const ModeFrequencies& modes) {
  return cutoff_from_hz(0.5 * (modes.slow_hz + modes.fast_hz));
}

inline FilterCutoff cutoff_frequency(const PendulumParams& p) { return cutoff_frequency(mode_frequencies(p)); }

}  // namespace samdamp
