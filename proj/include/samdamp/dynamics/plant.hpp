#pragma once

#include <Eigen/Dense>

#include "samdamp/dynamics/planar.hpp"
#include "samdamp/dynamics/spatial.hpp"

namespace samdamp {

/// Adapters giving the planar and spatial models a common shape for the simulator.
struct PlanarPlant {
  using State = PlanarState;
  using Vector = Eigen::Vector4d;
  using Value = double;  ///< scalar per twist/wrench component

  PendulumParams params;

  static Vector pack(const State& s) { return {s.q1, s.q2, s.q1dot, s.q2dot}; }
  static State unpack(const Vector& v) { return {v[0], v[1], v[2], v[3]}; }

  Vector derivative(const Vector& x, const PlanarWrench& u) const {
    const State s = unpack(x);
    const PlanarAcceleration a = planar_dynamics(s, u, params);
    return {s.q1dot, s.q2dot, a.q1ddot, a.q2ddot};
  }

  void check(const State& s) const {
    if (!s.finite()) throw InvalidStateError("planar state is not finite");
  }

  PlanarTwist twist(const State& s) const { return planar_twist(s, params); }
  ImuSample<double> imu(const State& s) const { return {s.theta_dot(), s.theta()}; }
  double energy(const State& s) const { return planar_energy(s, params); }
};

struct SpatialPlant {
  using State = SpatialState;
  using Vector = Eigen::Matrix<double, 10, 1>;
  using Value = Eigen::Vector3d;

  PendulumParams params;

  static Vector pack(const State& s) {
    Vector v;
    v << s.q, s.qdot;
    return v;
  }
  static State unpack(const Vector& v) {
    State s;
    s.q = v.head<5>();
    s.qdot = v.tail<5>();
    return s;
  }

  Vector derivative(const Vector& x, const SpatialWrench& u) const {
    const State s = unpack(x);
    Vector d;
    d << s.qdot, spatial_dynamics(s, u, params);
    return d;
  }

  void check(const State& s) const { check_spatial_state(s); }

  SpatialTwist twist(const State& s) const { return spatial_twist(s, params); }
  ImuSample<Eigen::Vector3d> imu(const State& s) const {
    const SpatialKinematics k = spatial_kinematics(s, params);
    return {k.omega_jacobian * s.qdot, roll_pitch_yaw(k.rotation)};
  }
  double energy(const State& s) const { return spatial_energy(s, params); }
};

}  // namespace samdamp
