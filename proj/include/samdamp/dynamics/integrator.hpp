#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "samdamp/control/damping.hpp"
#include "samdamp/control/gyro_noise.hpp"
#include "samdamp/dynamics/disturbance.hpp"
#include "samdamp/dynamics/plant.hpp"
#include "samdamp/errors.hpp"

namespace samdamp {

/// One classic fourth-order Runge-Kutta step of x' = f(t, x).
template <class F, class Vec>
Vec rk4_step(F&& f, double t, const Vec& x, double dt) {
  const Vec k1 = f(t, x);
  const Vec k2 = f(t + 0.5 * dt, Vec(x + 0.5 * dt * k1));
  const Vec k3 = f(t + 0.5 * dt, Vec(x + 0.5 * dt * k2));
  const Vec k4 = f(t + dt, Vec(x + dt * k3));
  return x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

struct SimOptions {
  double dt = 1e-3;             ///< integration step [s]
  double duration = 10.0;       ///< simulated time [s]
  double control_rate = 200.0;  ///< controller sample rate [Hz], zero-order hold between samples
  int record_stride = 1;        ///< keep every n-th step in the trajectory
  bool gyro_noise = false;
  std::uint64_t seed = 0;

  void validate() const {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("sim.dt", "must be > 0");
    if (!(duration >= dt) || !std::isfinite(duration)) throw ConfigError("sim.duration", "must be >= dt");
    if (!(control_rate > 0.0)) throw ConfigError("sim.control_rate", "must be > 0");
    if (record_stride < 1) throw ConfigError("sim.record_stride", "must be >= 1");
  }

  /// Integration steps per control sample (at least one).
  long control_steps() const {
    return std::max(1L, std::lround(1.0 / (control_rate * dt)));
  }
};

template <class Plant>
struct TrajectorySample {
  using V = typename Plant::Value;
  double t = 0.0;
  typename Plant::State state;
  BodyTwist<V> twist;
  BodyWrench<V> wrench;  ///< control wrench held over the step (disturbance excluded)
  ImuSample<V> imu;      ///< noise-free measurement
  V filtered_rate{};
  double energy = 0.0;
};

template <class Plant>
struct Trajectory {
  std::vector<TrajectorySample<Plant>> samples;
  /// Set when the run ended early through the stop predicate.
  bool stopped_early = false;

  std::size_t size() const { return samples.size(); }
  const TrajectorySample<Plant>& back() const { return samples.back(); }
};

/// Optional early-termination test evaluated on every recorded sample.
template <class Plant>
using StopPredicate = std::function<bool(const TrajectorySample<Plant>&)>;

/// Thrown when the state leaves the region where the model is valid. Carries the last good sample time.
class SimulationAborted : public NumericalError {
 public:
  SimulationAborted(double t, const std::string& why)
      : NumericalError("simulation aborted at t = " + std::to_string(t) + " s: " + why), time_(t) {}
  double time() const noexcept { return time_; }

 private:
  double time_;
};

/// Fixed-step RK4 simulation with a sampled controller and continuous disturbance.
///
/// The controller runs every SimOptions::control_steps() steps on the current
/// IMU sample and its wrench is held until the next sample. The disturbance is
/// evaluated at every RK4 stage.
template <class Plant>
Trajectory<Plant> simulate(const Plant& plant, const typename Plant::State& initial,
                           const ControlLaw<typename Plant::Value>& control,
                           const DisturbanceFn<typename Plant::Value>& disturbance, const SimOptions& opt,
                           const StopPredicate<Plant>& stop = {}) {
  using V = typename Plant::Value;
  using Vec = typename Plant::Vector;
  opt.validate();

  const long steps = std::lround(opt.duration / opt.dt);
  const long ctrl_every = opt.control_steps();
  const double ctrl_period = ctrl_every * opt.dt;
  std::optional<GyroNoise> noise;
  if (opt.gyro_noise) noise.emplace(1.0 / ctrl_period, opt.seed);

  Trajectory<Plant> traj;
  traj.samples.reserve(static_cast<std::size_t>(steps / opt.record_stride + 2));

  Vec x = Plant::pack(initial);
  ControlAction<V> action{zero_wrench<V>(), detail::zero_value<V>()};

  for (long n = 0; n <= steps; ++n) {
    const double t = n * opt.dt;
    const typename Plant::State s = Plant::unpack(x);
    try {
      plant.check(s);
    } catch (const NumericalError& e) {
      throw SimulationAborted(t, e.what());
    }
    const BodyTwist<V> twist = plant.twist(s);
    const ImuSample<V> imu = plant.imu(s);
    if (n % ctrl_every == 0 && control) {
      ImuSample<V> measured = imu;
      if (noise) noise->apply(measured.w_b);
      action = control(measured, twist);
    }
    if (n % opt.record_stride == 0 || n == steps) {
      traj.samples.push_back({t, s, twist, action.wrench, imu, action.filtered_rate, plant.energy(s)});
      if (stop && stop(traj.samples.back())) {
        traj.stopped_early = true;
        break;
      }
    }
    if (n == steps) break;

    const BodyWrench<V> held = action.wrench;
    auto f = [&](double tt, const Vec& xx) -> Vec {
      BodyWrench<V> u = held;
      if (disturbance) u += disturbance(tt);
      return plant.derivative(xx, u);
    };
    try {
      x = rk4_step(f, t, x, opt.dt);
    } catch (const NumericalError& e) {
      throw SimulationAborted(t, e.what());
    }
  }
  return traj;
}

}  // namespace samdamp
