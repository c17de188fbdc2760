#pragma once

#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "samdamp/dynamics/types.hpp"
#include "samdamp/errors.hpp"
#include "samdamp/params.hpp"

namespace samdamp {

/// Planar double pendulum configuration. q1 is the upper link angle from the
/// vertical, q2 the lower link angle relative to the upper link.
struct PlanarState {
  double q1 = 0.0;
  double q2 = 0.0;
  double q1dot = 0.0;
  double q2dot = 0.0;

  double theta() const { return q1 + q2; }
  double theta_dot() const { return q1dot + q2dot; }

  bool finite() const {
    return std::isfinite(q1) && std::isfinite(q2) && std::isfinite(q1dot) && std::isfinite(q2dot);
  }
};

struct PlanarAcceleration {
  double q1ddot = 0.0;
  double q2ddot = 0.0;
};

/// Point positions in the plane of motion; x horizontal, z up, origin at the suspension point.
struct PlanarPositions {
  Eigen::Vector2d hook;
  Eigen::Vector2d platform;
};

inline PlanarPositions planar_positions(const PlanarState& s, const PendulumParams& p) {
  const double th = s.theta();
  PlanarPositions r;
  r.hook = {p.l1 * std::sin(s.q1), -p.l1 * std::cos(s.q1)};
  r.platform = r.hook + Eigen::Vector2d{p.l2 * std::sin(th), -p.l2 * std::cos(th)};
  return r;
}

inline Eigen::Matrix2d planar_mass_matrix(const PlanarState& s, const PendulumParams& p) {
  const double c2 = std::cos(s.q2);
  const double a = p.m2 * p.l2 * p.l2;
  const double b = p.m2 * p.l1 * p.l2 * c2;
  Eigen::Matrix2d m;
  m(0, 0) = p.m12() * p.l1 * p.l1 + a + 2.0 * b;
  m(0, 1) = a + b;
  m(1, 0) = a + b;
  m(1, 1) = a;
  return m;
}

/// Christoffel-form Coriolis matrix; M' - 2C is skew-symmetric.
inline Eigen::Matrix2d planar_coriolis_matrix(const PlanarState& s, const PendulumParams& p) {
  const double h = p.m2 * p.l1 * p.l2 * std::sin(s.q2);
  Eigen::Matrix2d c;
  c << -h * s.q2dot, -h * (s.q1dot + s.q2dot), h * s.q1dot, 0.0;
  return c;
}

inline Eigen::Vector2d planar_gravity(const PlanarState& s, const PendulumParams& p) {
  const double gth = p.m2 * p.g * p.l2 * std::sin(s.theta());
  return {p.m12() * p.g * p.l1 * std::sin(s.q1) + gth, gth};
}

/// Maps joint rates to the body twist (v_b, w_b). v_b is the platform velocity
/// perpendicular to the lower link.
inline Eigen::Matrix2d planar_jacobian(const PlanarState& s, const PendulumParams& p) {
  Eigen::Matrix2d j;
  j << p.l1 * std::cos(s.q2) + p.l2, p.l2, 1.0, 1.0;
  return j;
}

/// Inverse Jacobian; refused at and beyond the fold |q2| >= pi/2 where det = l1 cos q2 vanishes.
inline Eigen::Matrix2d planar_jacobian_inverse(const PlanarState& s, const PendulumParams& p) {
  if (!(std::abs(s.q2) < std::numbers::pi / 2)) {
    throw SingularConfigurationError("planar Jacobian is not invertible for |q2| >= pi/2");
  }
  const double det = p.l1 * std::cos(s.q2);
  Eigen::Matrix2d inv;
  inv << 1.0, -p.l2, -1.0, p.l1 * std::cos(s.q2) + p.l2;
  return inv / det;
}

inline PlanarTwist planar_twist(const PlanarState& s, const PendulumParams& p) {
  const Eigen::Vector2d v = planar_jacobian(s, p) * Eigen::Vector2d{s.q1dot, s.q2dot};
  return {v[0], v[1]};
}

/// Kinetic plus potential energy, zero at the hanging equilibrium.
inline double planar_energy(const PlanarState& s, const PendulumParams& p) {
  const Eigen::Vector2d qd{s.q1dot, s.q2dot};
  const double kinetic = 0.5 * qd.dot(planar_mass_matrix(s, p) * qd);
  const double potential = p.m12() * p.g * p.l1 * (1.0 - std::cos(s.q1)) +
                           p.m2 * p.g * p.l2 * (1.0 - std::cos(s.theta()));
  return kinetic + potential;
}

/// Solves M(q) q'' = J^T u - C(q, q') q' - g(q) - D q' for the joint accelerations.
inline PlanarAcceleration planar_dynamics(const PlanarState& s, const PlanarWrench& u,
                                          const PendulumParams& p) {
  if (!s.finite() || !std::isfinite(u.force) || !std::isfinite(u.torque)) {
    throw InvalidStateError("planar_dynamics: non-finite state or wrench");
  }
  const Eigen::Vector2d qd{s.q1dot, s.q2dot};
  const Eigen::Vector2d generalized = planar_jacobian(s, p).transpose() * Eigen::Vector2d{u.force, u.torque};
  const Eigen::Vector2d damping{p.d1 * s.q1dot, p.d2 * s.q2dot};
  const Eigen::Vector2d rhs =
      generalized - planar_coriolis_matrix(s, p) * qd - planar_gravity(s, p) - damping;
  const Eigen::Vector2d qdd = planar_mass_matrix(s, p).ldlt().solve(rhs);
  return {qdd[0], qdd[1]};
}

}  // namespace samdamp
