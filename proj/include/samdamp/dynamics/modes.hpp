#pragma once

#include <cmath>
#include <numbers>

#include "samdamp/params.hpp"

namespace samdamp {

struct ModeFrequencies {
  double slow_hz = 0.0;
  double fast_hz = 0.0;
};

/// Small-oscillation frequencies of the undamped planar double pendulum.
///
/// nu^2 = g m12 / (8 pi^2 m1 l1 l2) * (l12 -+ sqrt(l12^2 - 4 m1 l1 l2 / m12)).
/// The discriminant equals (l1 - l2)^2 + 4 l1 l2 m2 / m12 and is never negative.
inline ModeFrequencies mode_frequencies(const PendulumParams& p) {
  const double m12 = p.m12();
  const double l12 = p.l12();
  const double scale = p.g * m12 / (8.0 * std::numbers::pi * std::numbers::pi * p.m1 * p.l1 * p.l2);
  const double diff = p.l1 - p.l2;
  const double root = std::sqrt(diff * diff + 4.0 * p.l1 * p.l2 * p.m2 / m12);
  // The slow root l12 - root cancels badly when m2 << m1; use the product of roots instead.
  const double fast_sq = scale * (l12 + root);
  const double product = scale * scale * 4.0 * p.m1 * p.l1 * p.l2 / m12;
  return {std::sqrt(product / fast_sq), std::sqrt(fast_sq)};
}

}  // namespace samdamp
