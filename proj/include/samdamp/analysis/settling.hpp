#pragma once

#include <cmath>
#include <optional>
#include <span>

#include "samdamp/errors.hpp"

namespace samdamp {

/// First time after which |signal| stays at or below `threshold` times its
/// peak magnitude; nullopt when the last sample is still above.
inline std::optional<double> settling_time(std::span<const double> times, std::span<const double> signal,
                                           double threshold = 0.05) {
  if (!(threshold > 0.0 && threshold < 1.0)) throw ConfigError("threshold", "must be in (0, 1)");
  if (times.size() != signal.size()) throw SamplingError("times and signal differ in length");
  if (signal.empty()) return std::nullopt;
  double peak = 0.0;
  for (double v : signal) peak = std::max(peak, std::abs(v));
  const double bound = threshold * peak;
  std::size_t k = signal.size();
  while (k > 0 && std::abs(signal[k - 1]) <= bound) --k;
  if (k == signal.size()) return std::nullopt;
  return k == 0 ? times.front() : times[k];
}

}  // namespace samdamp
