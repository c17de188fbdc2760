#pragma once

#include <Eigen/Dense>

namespace samdamp {

/// Platform velocity: linear v_b and angular w_b. V is double for the planar
/// model and Eigen::Vector3d (platform body frame) for the spatial one.
template <class V>
struct BodyTwist {
  V v_b{};
  V w_b{};
};

/// Force and torque applied at the platform centre of mass, same frames as BodyTwist.
template <class V>
struct BodyWrench {
  V force{};
  V torque{};

  BodyWrench& operator+=(const BodyWrench& o) {
    force += o.force;
    torque += o.torque;
    return *this;
  }
};

template <class V>
BodyWrench<V> operator+(BodyWrench<V> a, const BodyWrench<V>& b) {
  return a += b;
}

/// What the onboard IMU reports. Planar: orientation is the platform angle
/// theta. Spatial: orientation is (roll, pitch, yaw) of the platform frame.
template <class V>
struct ImuSample {
  V w_b{};
  V orientation{};
};

namespace detail {
template <class V>
V zero_value() {
  if constexpr (std::is_same_v<V, double>) {
    return 0.0;
  } else {
    return V::Zero();
  }
}
}  // namespace detail

template <class V>
BodyWrench<V> zero_wrench() {
  return {detail::zero_value<V>(), detail::zero_value<V>()};
}

using PlanarTwist = BodyTwist<double>;
using PlanarWrench = BodyWrench<double>;
using SpatialTwist = BodyTwist<Eigen::Vector3d>;
using SpatialWrench = BodyWrench<Eigen::Vector3d>;

}  // namespace samdamp
