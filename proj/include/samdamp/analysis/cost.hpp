#pragma once

#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "samdamp/dynamics/integrator.hpp"
#include "samdamp/dynamics/linear_model.hpp"
#include "samdamp/errors.hpp"
#include "samdamp/synthesis/weights.hpp"

namespace samdamp {

using Vector5 = Eigen::Matrix<double, 5, 1>;

/// Linear coordinates [q1, q1dot, theta, thetadot, w_lp] of a recorded planar sample.
inline Vector5 linear_coordinates(const TrajectorySample<PlanarPlant>& s) {
  Vector5 x;
  x << s.state.q1, s.state.q1dot, s.state.theta(), s.state.theta_dot(), s.filtered_rate;
  return x;
}

namespace detail {

inline double trapezoid(const std::vector<double>& t, const std::vector<double>& y) {
  double acc = 0.0;
  for (std::size_t k = 1; k < t.size(); ++k) acc += 0.5 * (t[k] - t[k - 1]) * (y[k] + y[k - 1]);
  return acc;
}

inline void require_uniform(const std::vector<double>& t) {
  if (t.size() < 2) return;
  const double dt = (t.back() - t.front()) / static_cast<double>(t.size() - 1);
  for (std::size_t k = 1; k < t.size(); ++k) {
    if (std::abs(t[k] - t[k - 1] - dt) > 1e-6 * dt) throw SamplingError("trajectory is not uniformly sampled");
  }
}

}  // namespace detail

/// Integral of x'Qx + u'Ru along a planar trajectory, trapezoidal rule.
inline double trajectory_cost(const Trajectory<PlanarPlant>& traj, const LqrWeights& w) {
  const Eigen::MatrixXd R = w.R();
  std::vector<double> t, y;
  t.reserve(traj.size());
  y.reserve(traj.size());
  for (const auto& s : traj.samples) {
    const Vector5 x = linear_coordinates(s);
    const Eigen::Vector2d u{s.wrench.force, s.wrench.torque};
    t.push_back(s.t);
    y.push_back(x.dot(w.Q * x) + u.dot(R * u));
  }
  detail::require_uniform(t);
  return detail::trapezoid(t, y);
}

struct LinearRun {
  std::vector<double> t;
  std::vector<Eigen::VectorXd> x;
  std::vector<Eigen::VectorXd> u;
};

/// Closed loop x' = (A - B F C) x, u = -F C x, by RK4.
inline LinearRun simulate_linear(const LinearModel& model, const Eigen::MatrixXd& F, const Eigen::VectorXd& x0,
                                 double dt, double duration) {
  if (!(dt > 0.0)) throw ConfigError("dt", "must be > 0");
  const Eigen::MatrixXd K = F * model.C;
  const Eigen::MatrixXd Acl = model.A - model.B * K;
  const long steps = std::lround(duration / dt);
  LinearRun run;
  run.t.reserve(steps + 1);
  Eigen::VectorXd x = x0;
  for (long n = 0;; ++n) {
    run.t.push_back(n * dt);
    run.x.push_back(x);
    run.u.push_back(-K * x);
    if (n == steps) break;
    x = rk4_step([&](double, const Eigen::VectorXd& v) -> Eigen::VectorXd { return Acl * v; }, n * dt, x, dt);
  }
  return run;
}

inline double linear_run_cost(const LinearRun& run, const LqrWeights& w) {
  const Eigen::MatrixXd R = w.R();
  std::vector<double> y;
  y.reserve(run.t.size());
  for (std::size_t k = 0; k < run.t.size(); ++k) {
    y.push_back(run.x[k].dot(w.Q * run.x[k]) + run.u[k].dot(R * run.u[k]));
  }
  return detail::trapezoid(run.t, y);
}

}  // namespace samdamp
