#pragma once

#include <Eigen/Dense>

#include "samdamp/errors.hpp"
#include "samdamp/params.hpp"

namespace samdamp {

/// Continuous-time state space model x' = A x + B u, y = C x.
///
/// For the pendulum the state is [q1, q1', theta, theta', theta'_lp] with
/// theta = q1 + q2 the platform angle and theta'_lp the low-pass filtered
/// gyro rate; u = [F, T]; y = [l2 theta' + l1 theta'_lp, theta'].
struct LinearModel {
  Eigen::MatrixXd A;
  Eigen::MatrixXd B;
  Eigen::MatrixXd C;

  Eigen::Index states() const { return A.rows(); }
  Eigen::Index inputs() const { return B.cols(); }
  Eigen::Index outputs() const { return C.rows(); }

  void check_structure() const {
    if (A.rows() != A.cols() || A.rows() == 0) throw StructuralError("A must be square and non-empty");
    if (B.rows() != A.rows() || B.cols() == 0) throw StructuralError("B must have as many rows as A");
    if (C.cols() != A.rows() || C.rows() == 0) throw StructuralError("C must have as many columns as A");
    if (!A.allFinite() || !B.allFinite() || !C.allFinite()) throw StructuralError("model has non-finite entries");
  }
};

/// Linearization of the undamped planar model about the hanging equilibrium,
/// with the first-order filter tau theta''_lp + theta'_lp = theta' appended.
inline LinearModel linearize(const PendulumParams& p, double tau) {
  if (!(tau > 0.0)) throw ConfigError("tau", "must be > 0");
  const double m12 = p.m12();
  LinearModel m;
  m.A = Eigen::MatrixXd::Zero(5, 5);
  m.A(0, 1) = 1.0;
  m.A(1, 0) = -p.g * m12 / (p.m1 * p.l1);
  m.A(1, 2) = p.m2 * p.g / (p.m1 * p.l1);
  m.A(2, 3) = 1.0;
  m.A(3, 0) = p.g * m12 / (p.m1 * p.l2);
  m.A(3, 2) = -p.g * m12 / (p.m1 * p.l2);
  m.A(4, 3) = 1.0 / tau;
  m.A(4, 4) = -1.0 / tau;

  m.B = Eigen::MatrixXd::Zero(5, 2);
  m.B(1, 1) = -1.0 / (p.m1 * p.l1 * p.l2);
  m.B(3, 0) = 1.0 / (p.m2 * p.l2);
  m.B(3, 1) = m12 / (p.m1 * p.m2 * p.l2 * p.l2);

  m.C = Eigen::MatrixXd::Zero(2, 5);
  m.C(0, 3) = p.l2;
  m.C(0, 4) = p.l1;
  m.C(1, 3) = 1.0;
  return m;
}

}  // namespace samdamp
