#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "samdamp/dynamics/types.hpp"
#include "samdamp/errors.hpp"

namespace samdamp {

/// Additive body wrench as a function of time.
template <class V>
using DisturbanceFn = std::function<BodyWrench<V>(double)>;

enum class DisturbanceKind {
  impulse,   ///< rectangular pulse of `duration`
  step,      ///< constant from `start` on (for `duration` if > 0)
  sinusoid,  ///< magnitude * sin(2 pi freq (t - start)) over `duration`
  jerk,      ///< train of `pulses` alternating-sign pulses of `width`, one per `period`
};

/// One scheduled disturbance. Magnitudes are platform-frame vectors; the planar
/// model sees the same wrench as its embedding does (F = -force.x, T = torque.y).
struct DisturbanceEvent {
  DisturbanceKind kind = DisturbanceKind::impulse;
  double start = 0.0;
  double duration = 0.05;
  Eigen::Vector3d force = Eigen::Vector3d::Zero();
  Eigen::Vector3d torque = Eigen::Vector3d::Zero();
  double frequency_hz = 1.0;
  int pulses = 4;
  double period = 0.5;
  double width = 0.1;

  /// Scale factor applied to the magnitudes at time t.
  double profile(double t) const {
    const double local = t - start;
    if (local < 0.0) return 0.0;
    switch (kind) {
      case DisturbanceKind::impulse:
        return local < duration ? 1.0 : 0.0;
      case DisturbanceKind::step:
        return (duration <= 0.0 || local < duration) ? 1.0 : 0.0;
      case DisturbanceKind::sinusoid:
        return local < duration ? std::sin(2.0 * std::numbers::pi * frequency_hz * local) : 0.0;
      case DisturbanceKind::jerk: {
        const int n = static_cast<int>(std::floor(local / period));
        if (n >= pulses) return 0.0;
        if (local - n * period >= width) return 0.0;
        return (n % 2 == 0) ? 1.0 : -1.0;
      }
    }
    return 0.0;
  }

  double end_time() const {
    switch (kind) {
      case DisturbanceKind::jerk:
        return start + (pulses - 1) * period + width;
      case DisturbanceKind::step:
        return duration <= 0.0 ? INFINITY : start + duration;
      default:
        return start + duration;
    }
  }

  void validate() const {
    if (!std::isfinite(start) || start < 0.0) throw ConfigError("disturbances.start", "must be >= 0");
    if (!std::isfinite(duration) || (kind != DisturbanceKind::step && duration <= 0.0)) {
      throw ConfigError("disturbances.duration", "must be > 0");
    }
    if (!force.allFinite() || !torque.allFinite()) throw ConfigError("disturbances", "magnitudes must be finite");
    if (kind == DisturbanceKind::sinusoid && !(frequency_hz > 0.0)) {
      throw ConfigError("disturbances.freq_hz", "must be > 0");
    }
    if (kind == DisturbanceKind::jerk) {
      if (pulses < 1) throw ConfigError("disturbances.pulses", "must be >= 1");
      if (!(period > 0.0)) throw ConfigError("disturbances.period", "must be > 0");
      if (!(width > 0.0) || width > period) throw ConfigError("disturbances.width", "must be in (0, period]");
    }
  }
};

using DisturbanceSchedule = std::vector<DisturbanceEvent>;

inline double schedule_end(const DisturbanceSchedule& s) {
  double end = 0.0;
  for (const auto& e : s) end = std::max(end, e.end_time());
  return end;
}

inline DisturbanceFn<Eigen::Vector3d> spatial_disturbance(DisturbanceSchedule schedule) {
  return [schedule = std::move(schedule)](double t) {
    SpatialWrench w = zero_wrench<Eigen::Vector3d>();
    for (const auto& e : schedule) {
      const double k = e.profile(t);
      if (k != 0.0) {
        w.force += k * e.force;
        w.torque += k * e.torque;
      }
    }
    return w;
  };
}

inline DisturbanceFn<double> planar_disturbance(DisturbanceSchedule schedule) {
  return [schedule = std::move(schedule)](double t) {
    PlanarWrench w{0.0, 0.0};
    for (const auto& e : schedule) {
      const double k = e.profile(t);
      w.force -= k * e.force.x();
      w.torque += k * e.torque.y();
    }
    return w;
  };
}

}  // namespace samdamp
