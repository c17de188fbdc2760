#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>

#include <Eigen/Dense>

#include "samdamp/control/lowpass.hpp"
#include "samdamp/dynamics/types.hpp"
#include "samdamp/errors.hpp"
#include "samdamp/params.hpp"

namespace samdamp {

struct DampingGains {
  double kv = 48.0;  ///< linear damping gain [N s/m]
  double kw = 70.0;  ///< angular damping gain [N m s/rad]

  void validate() const {
    if (!(kv > 0.0) || !std::isfinite(kv)) throw ConfigError("kv", "must be a finite value > 0");
    if (!(kw > 0.0) || !std::isfinite(kw)) throw ConfigError("kw", "must be a finite value > 0");
  }
};

/// Symmetric component-wise actuator limits; absent means unlimited.
struct WrenchSaturation {
  double force = 0.0;   ///< [N]
  double torque = 0.0;  ///< [N m]
};

inline constexpr double kDefaultYawGain = 20.0;  ///< [N m s/rad]

/// Proposed law in the plane: F = -kv (l1 w_lp + l2 w_b), T = -kw w_b.
///
/// Only the link lengths enter; masses in `p` are ignored.
inline PlanarWrench damping_wrench_planar(double w_b, double w_lp, const DampingGains& gains,
                                          const PendulumParams& p) {
  return {-gains.kv * (p.l1 * w_lp + p.l2 * w_b), -gains.kw * w_b};
}

/// Spatial extension of the proposed law, in the platform frame.
///
/// A body rate about a horizontal axis moves the platform perpendicular to it:
/// for a point hanging l below a pivot, v = l z x w. The force therefore acts
/// along z x (l1 w_lp + l2 w_b). Roll and pitch torques use kw; yaw is held by
/// a separate rate damper kpsi.
inline SpatialWrench damping_wrench_3d(const Eigen::Vector3d& w_b, const Eigen::Vector3d& w_lp,
                                       const DampingGains& gains, const PendulumParams& p,
                                       double kpsi = kDefaultYawGain) {
  const Eigen::Vector3d s = p.l1 * w_lp + p.l2 * w_b;
  const Eigen::Vector3d v_est{-s.y(), s.x(), 0.0};
  return {-gains.kv * v_est, Eigen::Vector3d{-gains.kw * w_b.x(), -gains.kw * w_b.y(), -kpsi * w_b.z()}};
}

/// Benchmark law with the full twist: F = -kv v_b, T = -kw w_b.
inline PlanarWrench ideal_wrench(const PlanarTwist& t, const DampingGains& gains) {
  return {-gains.kv * t.v_b, -gains.kw * t.w_b};
}

inline SpatialWrench ideal_wrench(const SpatialTwist& t, const DampingGains& gains,
                                  double kpsi = kDefaultYawGain) {
  return {-gains.kv * t.v_b, Eigen::Vector3d{-gains.kw * t.w_b.x(), -gains.kw * t.w_b.y(), -kpsi * t.w_b.z()}};
}

inline void saturate(PlanarWrench& w, const WrenchSaturation& s) {
  w.force = std::clamp(w.force, -s.force, s.force);
  w.torque = std::clamp(w.torque, -s.torque, s.torque);
}

inline void saturate(SpatialWrench& w, const WrenchSaturation& s) {
  w.force = w.force.cwiseMax(-s.force).cwiseMin(s.force);
  w.torque = w.torque.cwiseMax(-s.torque).cwiseMin(s.torque);
}

/// Output of one control tick. `filtered_rate` is the low-pass gyro state the
/// law used (zero for controllers without a filter).
template <class V>
struct ControlAction {
  BodyWrench<V> wrench;
  V filtered_rate;
};

/// A controller sees the IMU and, for benchmarking only, the true twist.
template <class V>
using ControlLaw = std::function<ControlAction<V>(const ImuSample<V>&, const BodyTwist<V>&)>;

enum class ControllerKind { proposed, ideal, passive };

struct ControllerConfig {
  ControllerKind kind = ControllerKind::proposed;
  DampingGains gains;
  double tau = 0.2094;  ///< low-pass time constant [s]
  double kpsi = kDefaultYawGain;
  std::optional<WrenchSaturation> saturation;
};

/// Builds a stateful control law sampled every `period` seconds.
template <class V>
ControlLaw<V> make_controller(const ControllerConfig& cfg, const PendulumParams& params, double period) {
  const auto zero = detail::zero_value<V>();
  switch (cfg.kind) {
    case ControllerKind::passive:
      return [zero](const ImuSample<V>&, const BodyTwist<V>&) {
        return ControlAction<V>{zero_wrench<V>(), zero};
      };
    case ControllerKind::ideal:
      return [cfg, zero](const ImuSample<V>&, const BodyTwist<V>& twist) {
        BodyWrench<V> w;
        if constexpr (std::is_same_v<V, double>) {
          w = ideal_wrench(twist, cfg.gains);
        } else {
          w = ideal_wrench(twist, cfg.gains, cfg.kpsi);
        }
        if (cfg.saturation) saturate(w, *cfg.saturation);
        return ControlAction<V>{w, zero};
      };
    case ControllerKind::proposed:
      break;
  }
  return [cfg, params, period, filter = LowPassFilter<V>(cfg.tau)](const ImuSample<V>& imu,
                                                                   const BodyTwist<V>&) mutable {
    const V w_lp = filter.update(imu.w_b, period);
    BodyWrench<V> w;
    if constexpr (std::is_same_v<V, double>) {
      w = damping_wrench_planar(imu.w_b, w_lp, cfg.gains, params);
    } else {
      w = damping_wrench_3d(imu.w_b, w_lp, cfg.gains, params, cfg.kpsi);
    }
    if (cfg.saturation) saturate(w, *cfg.saturation);
    return ControlAction<V>{w, w_lp};
  };
}

}  // namespace samdamp
