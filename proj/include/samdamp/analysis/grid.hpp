#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <string>
#include <thread>
#include <vector>

#include "samdamp/analysis/settling.hpp"
#include "samdamp/control/damping.hpp"
#include "samdamp/dynamics/integrator.hpp"
#include "samdamp/errors.hpp"
#include "samdamp/params.hpp"

namespace samdamp {

struct GridSpec {
  std::vector<double> l1_values;   ///< [m]
  std::vector<double> angles_deg;  ///< applied to both horizontal axes of both joints
  std::vector<double> rates;       ///< [rad/s], applied like the angles

  std::size_t cells() const { return l1_values.size() * angles_deg.size() * rates.size(); }

  /// l1 = 4..10 m step 1, angles 2..44 deg step 7, rates 0, 0.5, 1 rad/s.
  static GridSpec reference() {
    GridSpec g;
    for (int l = 4; l <= 10; ++l) g.l1_values.push_back(l);
    for (int a = 2; a <= 45; a += 7) g.angles_deg.push_back(a);
    g.rates = {0.0, 0.5, 1.0};
    return g;
  }

  void validate() const {
    if (cells() == 0) throw ConfigError("grid", "every axis needs at least one value");
    for (double l : l1_values) {
      if (!(l > 0.0)) throw ConfigError("grid.l1", "values must be > 0");
    }
    for (double a : angles_deg) {
      if (!(std::abs(a) < 90.0)) throw ConfigError("grid.angles_deg", "values must lie in (-90, 90)");
    }
    for (double r : rates) {
      if (!std::isfinite(r)) throw ConfigError("grid.rates", "values must be finite");
    }
  }
};

struct GridOptions {
  double energy_tolerance = 1e-4;  ///< [J] above equilibrium
  double time_budget = 120.0;      ///< [s] simulated
  double settling_threshold = 0.05;
  SimOptions sim;                  ///< dt, control rate and noise; duration is replaced by the budget
  unsigned threads = 0;            ///< 0 picks the hardware concurrency

  void validate() const {
    if (!(energy_tolerance > 0.0)) throw ConfigError("grid.energy_tolerance", "must be > 0");
    if (!(time_budget > 0.0)) throw ConfigError("grid.time_budget", "must be > 0");
    if (!(settling_threshold > 0.0 && settling_threshold < 1.0)) {
      throw ConfigError("grid.settling_threshold", "must be in (0, 1)");
    }
  }
};

struct GridCell {
  double l1 = 0.0;
  double angle_deg = 0.0;
  double rate = 0.0;
  bool converged = false;
  double settling_s = NAN;  ///< NaN when not settled
  double peak_force = 0.0;  ///< max |F| over the run [N]
  double peak_torque = 0.0; ///< max |T| over the run [N m]
  double final_energy = NAN;
  double end_time = 0.0;
  std::string diagnostic;
};

struct StabilityGridReport {
  GridSpec spec;
  std::vector<GridCell> cells;  ///< l1 outermost, then angle, then rate

  bool all_converged() const {
    return std::all_of(cells.begin(), cells.end(), [](const GridCell& c) { return c.converged; });
  }
};

/// Spatial initial state with every horizontal joint angle and rate set alike.
inline SpatialState grid_initial_state(double angle_deg, double rate) {
  SpatialState s;
  const double a = angle_deg * std::numbers::pi / 180.0;
  for (int i = 0; i < 4; ++i) {
    s.q[i] = a;
    s.qdot[i] = rate;
  }
  return s;
}

/// Runs one closed-loop cell until the energy drops below tolerance or the budget is spent.
inline GridCell run_grid_cell(const PendulumParams& base, const ControllerConfig& controller, const GridOptions& opt,
                              double l1, double angle_deg, double rate) {
  GridCell cell{l1, angle_deg, rate};
  PendulumParams p = base;
  p.l1 = l1;
  SpatialPlant plant{p};
  SimOptions sim = opt.sim;
  sim.duration = opt.time_budget;
  const double tol = opt.energy_tolerance;

  try {
    p.validate();
    auto law = make_controller<Eigen::Vector3d>(controller, p, sim.control_steps() * sim.dt);
    const auto traj = simulate(plant, grid_initial_state(angle_deg, rate), law, {}, sim,
                               StopPredicate<SpatialPlant>([tol](const auto& s) { return s.energy < tol; }));
    std::vector<double> t, w;
    t.reserve(traj.size());
    w.reserve(traj.size());
    for (const auto& s : traj.samples) {
      t.push_back(s.t);
      w.push_back(s.twist.w_b.norm());
      cell.peak_force = std::max(cell.peak_force, s.wrench.force.norm());
      cell.peak_torque = std::max(cell.peak_torque, s.wrench.torque.norm());
    }
    cell.final_energy = traj.back().energy;
    cell.end_time = traj.back().t;
    cell.converged = cell.final_energy < tol;
    if (auto ts = settling_time(t, w, opt.settling_threshold)) cell.settling_s = *ts;
    if (!cell.converged) cell.diagnostic = "energy above tolerance at end of budget";
  } catch (const Error& e) {
    cell.converged = false;
    cell.diagnostic = e.what();
  }
  return cell;
}

/// Every cell of the grid, in parallel when threads allow. The result order is
/// fixed by cell index, so output does not depend on scheduling.
inline StabilityGridReport stability_grid(const PendulumParams& params, const GridSpec& spec,
                                          const ControllerConfig& controller, const GridOptions& opt) {
  spec.validate();
  opt.validate();
  opt.sim.validate();

  struct Job {
    double l1, angle, rate;
  };
  std::vector<Job> jobs;
  jobs.reserve(spec.cells());
  for (double l1 : spec.l1_values) {
    for (double a : spec.angles_deg) {
      for (double r : spec.rates) jobs.push_back({l1, a, r});
    }
  }

  StabilityGridReport report{spec, std::vector<GridCell>(jobs.size())};
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      report.cells[i] = run_grid_cell(params, controller, opt, jobs[i].l1, jobs[i].angle, jobs[i].rate);
    }
  };
  unsigned n = opt.threads ? opt.threads : std::max(1u, std::thread::hardware_concurrency());
  n = static_cast<unsigned>(std::min<std::size_t>(n, jobs.size()));
  if (n <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned k = 0; k < n; ++k) pool.emplace_back(worker);
  }
  return report;
}

}  // namespace samdamp
