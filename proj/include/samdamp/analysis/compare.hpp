#pragma once

#include <string>
#include <vector>

#include "samdamp/control/damping.hpp"
#include "samdamp/dynamics/disturbance.hpp"
#include "samdamp/dynamics/integrator.hpp"
#include "samdamp/errors.hpp"
#include "samdamp/io/csv.hpp"

namespace samdamp {

struct NamedController {
  std::string name;  ///< column prefix in the comparison CSV
  ControllerConfig config;
};

template <class Plant>
struct ComparisonRun {
  std::string name;
  Trajectory<Plant> trajectory;
};

template <class Plant>
struct ComparisonBundle {
  std::vector<ComparisonRun<Plant>> runs;
};

namespace detail {

inline DisturbanceFn<double> make_disturbance(const PlanarPlant&, const DisturbanceSchedule& s) {
  return planar_disturbance(s);
}
inline DisturbanceFn<Eigen::Vector3d> make_disturbance(const SpatialPlant&, const DisturbanceSchedule& s) {
  return spatial_disturbance(s);
}

}  // namespace detail

/// Same plant, initial state, disturbances and noise seed for every controller.
template <class Plant>
ComparisonBundle<Plant> compare_controllers(const Plant& plant, const typename Plant::State& initial,
                                            const DisturbanceSchedule& disturbances,
                                            const std::vector<NamedController>& controllers, const SimOptions& opt) {
  if (controllers.empty()) throw ConfigError("controllers", "need at least one controller");
  for (std::size_t i = 0; i < controllers.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (controllers[i].name == controllers[j].name) throw ConfigError("controllers", "duplicate name " + controllers[i].name);
    }
  }
  const double period = opt.control_steps() * opt.dt;
  const auto dist = detail::make_disturbance(plant, disturbances);
  ComparisonBundle<Plant> out;
  for (const auto& c : controllers) {
    auto law = make_controller<typename Plant::Value>(c.config, plant.params, period);
    out.runs.push_back({c.name, simulate(plant, initial, law, dist, opt)});
  }
  return out;
}

/// One time column, then each controller's trajectory columns prefixed by its name.
template <class Plant>
io::CsvTable comparison_table(const Plant& plant, const ComparisonBundle<Plant>& bundle) {
  std::vector<std::string> header{"t"};
  const auto cols = io::trajectory_columns(plant);
  for (const auto& r : bundle.runs) {
    for (const auto& c : cols) header.push_back(r.name + "_" + c);
  }
  io::CsvTable table(std::move(header));
  const std::size_t n = bundle.runs.front().trajectory.size();
  for (const auto& r : bundle.runs) {
    if (r.trajectory.size() != n) throw StructuralError("comparison runs have different lengths");
  }
  std::vector<double> row;
  for (std::size_t k = 0; k < n; ++k) {
    row.assign(1, bundle.runs.front().trajectory.samples[k].t);
    for (const auto& r : bundle.runs) io::append_values(row, r.trajectory.samples[k]);
    table.add_row(row);
  }
  return table;
}

}  // namespace samdamp
