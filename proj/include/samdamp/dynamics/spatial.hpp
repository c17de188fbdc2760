#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Dense>

#include "samdamp/dual.hpp"
#include "samdamp/dynamics/planar.hpp"
#include "samdamp/dynamics/types.hpp"
#include "samdamp/errors.hpp"
#include "samdamp/params.hpp"

namespace samdamp {

using Vector5d = Eigen::Matrix<double, 5, 1>;
using Matrix5d = Eigen::Matrix<double, 5, 5>;
using Matrix35d = Eigen::Matrix<double, 3, 5>;

/// Spatial double pendulum with two rotations per passive joint and a platform yaw.
///
/// Each joint rotates its child frame by Rx(phi_x) * Ry(phi_y) relative to the
/// parent; the platform frame is additionally rotated by Rz(psi) about the lower
/// link. Frames are x forward, y left, z up along the link. Restricting motion
/// to phi1y = q1, phi2y = q2 reproduces the planar model mirrored in x: planar
/// v_b and F map to -x in the platform frame, planar w_b and T to +y.
struct SpatialState {
  enum Index : int { phi1x = 0, phi1y = 1, phi2x = 2, phi2y = 3, psi = 4 };

  Vector5d q = Vector5d::Zero();
  Vector5d qdot = Vector5d::Zero();

  bool finite() const { return q.allFinite() && qdot.allFinite(); }
};

/// Joint angles closer than this to +-pi/2 are treated as singular.
inline constexpr double kGimbalMargin = 1e-3;

namespace detail {

template <class S>
using Vec3T = std::array<S, 3>;
template <class S>
using Mat3T = std::array<std::array<S, 3>, 3>;

template <class S>
Mat3T<S> mul(const Mat3T<S>& a, const Mat3T<S>& b) {
  Mat3T<S> r;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      r[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j] + a[i][2] * b[2][j];
    }
  }
  return r;
}

// Rx(ax) * Ry(ay)
template <class S>
Mat3T<S> joint_rotation(const S& ax, const S& ay) {
  using std::cos;
  using std::sin;
  const S sa = sin(ax), ca = cos(ax), sb = sin(ay), cb = cos(ay);
  Mat3T<S> r;
  r[0] = {cb, S(0.0), sb};
  r[1] = {sa * sb, ca, -(sa * cb)};
  r[2] = {-(ca * sb), sa, ca * cb};
  return r;
}

template <class S>
Mat3T<S> rot_z(const S& a) {
  using std::cos;
  using std::sin;
  const S s = sin(a), c = cos(a);
  Mat3T<S> r;
  r[0] = {c, -s, S(0.0)};
  r[1] = {s, c, S(0.0)};
  r[2] = {S(0.0), S(0.0), S(1.0)};
  return r;
}

template <class S>
struct PoseT {
  Vec3T<S> hook;
  Vec3T<S> platform;
  Mat3T<S> rotation;  // platform frame in the inertial frame
};

template <class S>
PoseT<S> pose(const std::array<S, 5>& q, const PendulumParams& p) {
  const Mat3T<S> r1 = joint_rotation(q[0], q[1]);
  const Mat3T<S> r12 = mul(r1, joint_rotation(q[2], q[3]));
  PoseT<S> out;
  for (int k = 0; k < 3; ++k) {
    out.hook[k] = -(r1[k][2] * p.l1);
    out.platform[k] = out.hook[k] - r12[k][2] * p.l2;
  }
  out.rotation = mul(r12, rot_z(q[4]));
  return out;
}

// vee of the skew-symmetric part of R^T X
template <class S>
Vec3T<S> body_vee(const Mat3T<S>& r, const Mat3T<S>& x) {
  auto rtx = [&](int i, int j) { return r[0][i] * x[0][j] + r[1][i] * x[1][j] + r[2][i] * x[2][j]; };
  return {(rtx(2, 1) - rtx(1, 2)) * 0.5, (rtx(0, 2) - rtx(2, 0)) * 0.5, (rtx(1, 0) - rtx(0, 1)) * 0.5};
}

template <class S>
struct JacobiansT {
  std::array<Vec3T<S>, 5> hook;      // columns d(hook position)/dq_i
  std::array<Vec3T<S>, 5> platform;  // columns d(platform position)/dq_i
  std::array<Vec3T<S>, 5> omega;     // columns of body angular velocity Jacobian
  Mat3T<S> rotation;
};

template <class S>
JacobiansT<S> jacobians(const std::array<S, 5>& q, const PendulumParams& p) {
  using D = Dual<S, 5>;
  std::array<D, 5> qd;
  for (int i = 0; i < 5; ++i) qd[i] = D::variable(q[i], i);
  const PoseT<D> ps = pose(qd, p);
  JacobiansT<S> j;
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) j.rotation[a][b] = ps.rotation[a][b].v;
  }
  for (int i = 0; i < 5; ++i) {
    Mat3T<S> dr;
    for (int k = 0; k < 3; ++k) {
      j.hook[i][k] = ps.hook[k].d[i];
      j.platform[i][k] = ps.platform[k].d[i];
      for (int b = 0; b < 3; ++b) dr[k][b] = ps.rotation[k][b].d[i];
    }
    j.omega[i] = body_vee(j.rotation, dr);
  }
  return j;
}

template <class S>
S dot3(const Vec3T<S>& a, const Vec3T<S>& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

template <class S>
std::array<std::array<S, 5>, 5> mass_matrix(const std::array<S, 5>& q, const PendulumParams& p) {
  const JacobiansT<S> j = jacobians(q, p);
  std::array<std::array<S, 5>, 5> m;
  for (int a = 0; a < 5; ++a) {
    for (int b = a; b < 5; ++b) {
      m[a][b] = dot3(j.hook[a], j.hook[b]) * p.m1 + dot3(j.platform[a], j.platform[b]) * p.m2 +
                j.omega[a][2] * j.omega[b][2] * p.jz;
      m[b][a] = m[a][b];
    }
  }
  return m;
}

inline std::array<double, 5> to_array(const Vector5d& v) { return {v[0], v[1], v[2], v[3], v[4]}; }

}  // namespace detail

/// Positions, orientation and Jacobians of the spatial model at one configuration.
struct SpatialKinematics {
  Eigen::Vector3d hook;
  Eigen::Vector3d platform;
  Eigen::Matrix3d rotation;  ///< platform frame in the inertial frame
  Matrix35d hook_jacobian;
  Matrix35d platform_jacobian;  ///< inertial-frame linear velocity
  Matrix35d omega_jacobian;     ///< body-frame angular velocity
};

inline SpatialKinematics spatial_kinematics(const SpatialState& s, const PendulumParams& p) {
  const auto q = detail::to_array(s.q);
  const auto j = detail::jacobians(q, p);
  const auto ps = detail::pose(q, p);
  SpatialKinematics k;
  for (int a = 0; a < 3; ++a) {
    k.hook[a] = ps.hook[a];
    k.platform[a] = ps.platform[a];
    for (int b = 0; b < 3; ++b) k.rotation(a, b) = j.rotation[a][b];
    for (int i = 0; i < 5; ++i) {
      k.hook_jacobian(a, i) = j.hook[i][a];
      k.platform_jacobian(a, i) = j.platform[i][a];
      k.omega_jacobian(a, i) = j.omega[i][a];
    }
  }
  return k;
}

inline Matrix5d spatial_mass_matrix(const SpatialKinematics& k, const PendulumParams& p) {
  Matrix5d m = p.m1 * k.hook_jacobian.transpose() * k.hook_jacobian +
               p.m2 * k.platform_jacobian.transpose() * k.platform_jacobian;
  m += p.jz * k.omega_jacobian.row(2).transpose() * k.omega_jacobian.row(2);
  return m;
}

inline Matrix5d spatial_mass_matrix(const SpatialState& s, const PendulumParams& p) {
  return spatial_mass_matrix(spatial_kinematics(s, p), p);
}

/// Gradient of the potential energy.
inline Vector5d spatial_gravity(const SpatialKinematics& k, const PendulumParams& p) {
  return p.g * (p.m1 * k.hook_jacobian.row(2).transpose() + p.m2 * k.platform_jacobian.row(2).transpose());
}

/// Velocity-product (Coriolis and centrifugal) generalized forces, projected
/// from the point accelerations and the Euler equation of the yaw inertia.
inline Vector5d spatial_velocity_product(const SpatialState& s, const SpatialKinematics& k,
                                         const PendulumParams& p) {
  using D1 = Dual<double, 1>;
  using D2 = Dual<D1, 1>;
  std::array<D2, 5> q;
  for (int i = 0; i < 5; ++i) {
    q[i] = D2(D1(s.q[i], {s.qdot[i]}), {D1(s.qdot[i], {0.0})});
  }
  const auto ps = detail::pose(q, p);
  Eigen::Vector3d hook_acc, platform_acc;
  detail::Mat3T<double> r, rdot, rddot;
  for (int a = 0; a < 3; ++a) {
    hook_acc[a] = ps.hook[a].d[0].d[0];
    platform_acc[a] = ps.platform[a].d[0].d[0];
    for (int b = 0; b < 3; ++b) {
      r[a][b] = ps.rotation[a][b].v.v;
      rdot[a][b] = ps.rotation[a][b].v.d[0];
      rddot[a][b] = ps.rotation[a][b].d[0].d[0];
    }
  }
  const auto w = detail::body_vee(r, rdot);
  // d/dt (R^T R') = R'^T R' + R^T R''; the first term is symmetric.
  const auto wdot = detail::body_vee(r, rddot);
  const Eigen::Vector3d omega{w[0], w[1], w[2]};
  const Eigen::Vector3d inertia_omega{0.0, 0.0, p.jz * omega.z()};
  const Eigen::Vector3d rot_bias = Eigen::Vector3d{0.0, 0.0, p.jz * wdot[2]} + omega.cross(inertia_omega);
  return p.m1 * k.hook_jacobian.transpose() * hook_acc + p.m2 * k.platform_jacobian.transpose() * platform_acc +
         k.omega_jacobian.transpose() * rot_bias;
}

/// Coriolis matrix from the Christoffel symbols of the mass matrix. Slower than
/// spatial_velocity_product; C(q, q') q' equals it.
inline Matrix5d spatial_coriolis_matrix(const SpatialState& s, const PendulumParams& p) {
  using D = Dual<double, 5>;
  std::array<D, 5> q;
  for (int i = 0; i < 5; ++i) q[i] = D::variable(s.q[i], i);
  const auto m = detail::mass_matrix(q, p);
  // dm(k, j, i) = dM_kj / dq_i
  auto dm = [&](int k, int j, int i) { return m[k][j].d[i]; };
  Matrix5d c = Matrix5d::Zero();
  for (int k = 0; k < 5; ++k) {
    for (int j = 0; j < 5; ++j) {
      double sum = 0.0;
      for (int i = 0; i < 5; ++i) sum += 0.5 * (dm(k, j, i) + dm(k, i, j) - dm(i, j, k)) * s.qdot[i];
      c(k, j) = sum;
    }
  }
  return c;
}

inline SpatialTwist spatial_twist(const SpatialState& s, const SpatialKinematics& k) {
  return {k.rotation.transpose() * (k.platform_jacobian * s.qdot), k.omega_jacobian * s.qdot};
}

inline SpatialTwist spatial_twist(const SpatialState& s, const PendulumParams& p) {
  return spatial_twist(s, spatial_kinematics(s, p));
}

/// Kinetic plus potential energy, zero at the hanging equilibrium.
inline double spatial_energy(const SpatialState& s, const SpatialKinematics& k, const PendulumParams& p) {
  const double kinetic = 0.5 * s.qdot.dot(spatial_mass_matrix(k, p) * s.qdot);
  const double potential = p.g * (p.m1 * (k.hook.z() + p.l1) + p.m2 * (k.platform.z() + p.l12()));
  return kinetic + potential;
}

inline double spatial_energy(const SpatialState& s, const PendulumParams& p) {
  return spatial_energy(s, spatial_kinematics(s, p), p);
}

/// Roll, pitch, yaw (Z-Y-X convention) of a rotation matrix.
inline Eigen::Vector3d roll_pitch_yaw(const Eigen::Matrix3d& r) {
  const double sp = std::clamp(-r(2, 0), -1.0, 1.0);
  return {std::atan2(r(2, 1), r(2, 2)), std::asin(sp), std::atan2(r(1, 0), r(0, 0))};
}

/// Each joint is Rx(phi_x) Ry(phi_y); the map loses rank only where cos(phi_y) = 0.
inline void check_spatial_state(const SpatialState& s) {
  if (!s.finite()) throw InvalidStateError("spatial state is not finite");
  for (int i : {SpatialState::phi1y, SpatialState::phi2y}) {
    if (std::abs(s.q[i]) >= std::numbers::pi / 2 - kGimbalMargin) {
      throw SingularConfigurationError("joint angle " + std::to_string(i) + " = " + std::to_string(s.q[i]) +
                                       " rad is at the gimbal singularity");
    }
  }
}

/// Joint accelerations under a platform-frame body wrench.
inline Vector5d spatial_dynamics(const SpatialState& s, const SpatialWrench& u, const PendulumParams& p) {
  check_spatial_state(s);
  if (!u.force.allFinite() || !u.torque.allFinite()) throw InvalidStateError("spatial wrench is not finite");
  const SpatialKinematics k = spatial_kinematics(s, p);
  Vector5d damping;
  damping << p.d1 * s.qdot[0], p.d1 * s.qdot[1], p.d2 * s.qdot[2], p.d2 * s.qdot[3], 0.0;
  const Vector5d generalized = k.platform_jacobian.transpose() * (k.rotation * u.force) +
                               k.omega_jacobian.transpose() * u.torque;
  const Vector5d rhs = generalized - spatial_velocity_product(s, k, p) - spatial_gravity(k, p) - damping;
  return spatial_mass_matrix(k, p).llt().solve(rhs);
}

// Planar embedding.

inline SpatialState embed_planar(const PlanarState& s) {
  SpatialState out;
  out.q[SpatialState::phi1y] = s.q1;
  out.q[SpatialState::phi2y] = s.q2;
  out.qdot[SpatialState::phi1y] = s.q1dot;
  out.qdot[SpatialState::phi2y] = s.q2dot;
  return out;
}

inline SpatialWrench embed_planar(const PlanarWrench& w) {
  return {Eigen::Vector3d{-w.force, 0.0, 0.0}, Eigen::Vector3d{0.0, w.torque, 0.0}};
}

inline PlanarTwist project_planar(const SpatialTwist& t) { return {-t.v_b.x(), t.w_b.y()}; }

}  // namespace samdamp
