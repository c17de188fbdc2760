#pragma once

#include <cmath>

#include "samdamp/errors.hpp"

namespace samdamp {

/// Physical parameters of the suspended double pendulum.
///
/// Two point masses: the hook (m1) at the end of the upper link and the
/// platform (m2) at the end of the lower link. Links are massless. The
/// defaults are the measured values of the reference platform; joint damping
/// and yaw inertia were not measured and are nominal.
struct PendulumParams {
  double m1 = 18.5;  ///< hook mass [kg]
  double m2 = 55.0;  ///< platform mass [kg]
  double l1 = 6.0;   ///< upper link length [m]
  double l2 = 2.2;   ///< lower link length [m]
  double g = 9.81;   ///< gravity [m/s^2]
  double d1 = 0.5;   ///< viscous damping of joint 1 [N m s/rad]
  double d2 = 0.5;   ///< viscous damping of joint 2 [N m s/rad]
  double jz = 5.0;   ///< platform yaw inertia [kg m^2]

  double m12() const { return m1 + m2; }
  double l12() const { return l1 + l2; }

  /// Throws ConfigError naming the first field that violates its invariant.
  void validate() const {
    auto positive = [](const char* name, double v) {
      if (!std::isfinite(v) || v <= 0.0) throw ConfigError(name, "must be a finite value > 0");
    };
    auto non_negative = [](const char* name, double v) {
      if (!std::isfinite(v) || v < 0.0) throw ConfigError(name, "must be a finite value >= 0");
    };
    positive("m1", m1);
    positive("m2", m2);
    positive("l1", l1);
    positive("l2", l2);
    positive("g", g);
    non_negative("d1", d1);
    non_negative("d2", d2);
    positive("jz", jz);
  }

  PendulumParams undamped() const {
    PendulumParams p = *this;
    p.d1 = 0.0;
    p.d2 = 0.0;
    return p;
  }
};

}  // namespace samdamp
