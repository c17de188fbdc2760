#pragma once

#include <algorithm>
#include <fstream>
#include <initializer_list>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "samdamp/analysis/grid.hpp"
#include "samdamp/analysis/spectrum.hpp"
#include "samdamp/control/cutoff.hpp"
#include "samdamp/control/damping.hpp"
#include "samdamp/dynamics/disturbance.hpp"
#include "samdamp/dynamics/integrator.hpp"
#include "samdamp/errors.hpp"
#include "samdamp/params.hpp"
#include "samdamp/synthesis/output_feedback.hpp"
#include "samdamp/synthesis/weights.hpp"

namespace samdamp::io {

enum class ModelKind { planar, spatial };

/// Where the low-pass time constant comes from.
enum class TauSource { midpoint, tau, cutoff_hz };

struct SweepConfig {
  double sigma_min = 1e-6;
  double sigma_max = 8e-5;
  int points = 20;

  std::vector<double> sigmas() const { return log_grid(sigma_min, sigma_max, points); }
};

struct SpectrumConfig {
  std::string signal = "wb";
  bool undamped = true;  ///< zero joint damping for the free swing
  PeakOptions peaks;
};

/// Everything a CLI run needs. Defaults reproduce the reference platform with the reference gains.
struct Scenario {
  std::string name;
  ModelKind model = ModelKind::planar;
  PendulumParams params;
  PlanarState planar_initial;
  SpatialState spatial_initial;

  ControllerConfig controller;
  TauSource tau_source = TauSource::cutoff_hz;
  double cutoff_hz = 0.76;  ///< resolved cutoff [Hz]

  DisturbanceSchedule disturbances;
  SimOptions sim;
  double settling_threshold = 0.05;

  LqrWeights weights = LqrWeights::damping_defaults(5e-6);
  SynthesisOptions synthesis;
  SweepConfig sweep;
  GridSpec grid = GridSpec::reference();
  GridOptions grid_options;
  SpectrumConfig spectrum;
  std::vector<ControllerKind> compare = {ControllerKind::proposed, ControllerKind::ideal};

  /// Recomputes tau from its source; call after editing params.
  void resolve_tau() {
    switch (tau_source) {
      case TauSource::midpoint: {
        const FilterCutoff c = cutoff_frequency(params);
        cutoff_hz = c.cutoff_hz;
        controller.tau = c.tau;
        break;
      }
      case TauSource::cutoff_hz:
        controller.tau = cutoff_from_hz(cutoff_hz).tau;
        break;
      case TauSource::tau:
        if (!(controller.tau > 0.0)) throw ConfigError("controller.tau", "must be > 0");
        cutoff_hz = 1.0 / (2.0 * std::numbers::pi * controller.tau);
        break;
    }
  }
};

inline const char* to_string(ControllerKind k) {
  switch (k) {
    case ControllerKind::proposed: return "proposed";
    case ControllerKind::ideal: return "ideal";
    case ControllerKind::passive: return "passive";
  }
  return "?";
}

namespace detail {

using nlohmann::json;

inline std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

inline void require_object(const json& j, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path.empty() ? "config" : path, "must be an object");
}

inline void allow_keys(const json& j, const std::string& path, std::initializer_list<const char*> keys) {
  require_object(j, path);
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::none_of(keys.begin(), keys.end(), [&](const char* k) { return it.key() == k; })) {
      throw ConfigError(join(path, it.key()), "unknown key");
    }
  }
}

inline void read(const json& j, const std::string& path, const char* key, double& out) {
  if (!j.contains(key)) return;
  const json& v = j.at(key);
  if (!v.is_number()) throw ConfigError(join(path, key), "must be a number");
  out = v.get<double>();
}

inline void read(const json& j, const std::string& path, const char* key, int& out) {
  if (!j.contains(key)) return;
  const json& v = j.at(key);
  if (!v.is_number_integer()) throw ConfigError(join(path, key), "must be an integer");
  out = v.get<int>();
}

inline void read(const json& j, const std::string& path, const char* key, unsigned& out) {
  if (!j.contains(key)) return;
  const json& v = j.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 0) throw ConfigError(join(path, key), "must be a non-negative integer");
  out = v.get<unsigned>();
}

inline void read(const json& j, const std::string& path, const char* key, std::uint64_t& out) {
  if (!j.contains(key)) return;
  const json& v = j.at(key);
  if (!v.is_number_unsigned()) throw ConfigError(join(path, key), "must be a non-negative integer");
  out = v.get<std::uint64_t>();
}

inline void read(const json& j, const std::string& path, const char* key, bool& out) {
  if (!j.contains(key)) return;
  const json& v = j.at(key);
  if (!v.is_boolean()) throw ConfigError(join(path, key), "must be true or false");
  out = v.get<bool>();
}

inline void read(const json& j, const std::string& path, const char* key, std::string& out) {
  if (!j.contains(key)) return;
  const json& v = j.at(key);
  if (!v.is_string()) throw ConfigError(join(path, key), "must be a string");
  out = v.get<std::string>();
}

inline std::vector<double> numbers(const json& v, const std::string& field, std::optional<std::size_t> size = {}) {
  if (!v.is_array()) throw ConfigError(field, "must be an array of numbers");
  std::vector<double> out;
  for (const auto& e : v) {
    if (!e.is_number()) throw ConfigError(field, "must be an array of numbers");
    out.push_back(e.get<double>());
  }
  if (size && out.size() != *size) throw ConfigError(field, "must have " + std::to_string(*size) + " entries");
  return out;
}

inline Eigen::Vector3d vec3(const json& v, const std::string& field) {
  const auto n = numbers(v, field, 3);
  return {n[0], n[1], n[2]};
}

template <class Enum>
Enum choice(const json& j, const std::string& path, const char* key, Enum current,
            std::initializer_list<std::pair<const char*, Enum>> options) {
  if (!j.contains(key)) return current;
  const json& v = j.at(key);
  std::string names;
  for (const auto& [name, value] : options) {
    if (v.is_string() && v.get<std::string>() == name) return value;
    names += names.empty() ? name : std::string("|") + name;
  }
  throw ConfigError(join(path, key), "must be one of " + names);
}

inline void parse_params(const json& j, PendulumParams& p) {
  allow_keys(j, "params", {"m1", "m2", "l1", "l2", "g", "d1", "d2", "jz"});
  read(j, "params", "m1", p.m1);
  read(j, "params", "m2", p.m2);
  read(j, "params", "l1", p.l1);
  read(j, "params", "l2", p.l2);
  read(j, "params", "g", p.g);
  read(j, "params", "d1", p.d1);
  read(j, "params", "d2", p.d2);
  read(j, "params", "jz", p.jz);
  try {
    p.validate();
  } catch (const ConfigError& e) {
    throw ConfigError("params." + e.field(), std::string(e.what()).substr(e.field().size() + 2));
  }
}

inline void parse_initial(const json& j, Scenario& s) {
  const std::string path = "initial";
  require_object(j, path);
  std::string unit = "deg";
  read(j, path, "angle_unit", unit);
  if (unit != "deg" && unit != "rad") throw ConfigError("initial.angle_unit", "must be deg or rad");
  const double k = unit == "deg" ? std::numbers::pi / 180.0 : 1.0;
  if (s.model == ModelKind::planar) {
    allow_keys(j, path, {"angle_unit", "q1", "q2", "q1dot", "q2dot"});
    double q1 = 0, q2 = 0, q1d = 0, q2d = 0;
    read(j, path, "q1", q1);
    read(j, path, "q2", q2);
    read(j, path, "q1dot", q1d);
    read(j, path, "q2dot", q2d);
    s.planar_initial = {k * q1, k * q2, k * q1d, k * q2d};
    if (std::abs(s.planar_initial.q2) >= std::numbers::pi / 2) throw ConfigError("initial.q2", "must satisfy |q2| < 90 deg");
    if (!s.planar_initial.finite()) throw ConfigError("initial", "values must be finite");
  } else {
    allow_keys(j, path, {"angle_unit", "phi1x", "phi1y", "phi2x", "phi2y", "psi", "phi1x_dot", "phi1y_dot",
                         "phi2x_dot", "phi2y_dot", "psi_dot"});
    static const char* names[] = {"phi1x", "phi1y", "phi2x", "phi2y", "psi"};
    static const char* rates[] = {"phi1x_dot", "phi1y_dot", "phi2x_dot", "phi2y_dot", "psi_dot"};
    for (int i = 0; i < 5; ++i) {
      double a = 0, r = 0;
      read(j, path, names[i], a);
      read(j, path, rates[i], r);
      s.spatial_initial.q[i] = k * a;
      s.spatial_initial.qdot[i] = k * r;
    }
    try {
      check_spatial_state(s.spatial_initial);
    } catch (const NumericalError& e) {
      throw ConfigError("initial", e.what());
    }
  }
}

inline void parse_controller(const json& j, Scenario& s) {
  const std::string path = "controller";
  allow_keys(j, path, {"type", "kv", "kw", "tau", "cutoff_hz", "kpsi", "noise_enabled", "saturation"});
  auto& c = s.controller;
  c.kind = choice(j, path, "type", c.kind,
                  {{"proposed", ControllerKind::proposed}, {"ideal", ControllerKind::ideal},
                   {"passive", ControllerKind::passive}});
  read(j, path, "kv", c.gains.kv);
  read(j, path, "kw", c.gains.kw);
  read(j, path, "kpsi", c.kpsi);
  read(j, path, "noise_enabled", s.sim.gyro_noise);
  if (j.contains("tau") && j.contains("cutoff_hz")) throw ConfigError("controller.tau", "give either tau or cutoff_hz");
  if (j.contains("tau")) {
    const json& t = j.at("tau");
    if (t.is_string() && t.get<std::string>() == "midpoint") {
      s.tau_source = TauSource::midpoint;
    } else if (t.is_number()) {
      s.tau_source = TauSource::tau;
      c.tau = t.get<double>();
      if (!(c.tau > 0.0)) throw ConfigError("controller.tau", "must be > 0");
    } else {
      throw ConfigError("controller.tau", "must be \"midpoint\" or a time constant in seconds");
    }
  }
  if (j.contains("cutoff_hz")) {
    s.tau_source = TauSource::cutoff_hz;
    read(j, path, "cutoff_hz", s.cutoff_hz);
    if (!(s.cutoff_hz > 0.0)) throw ConfigError("controller.cutoff_hz", "must be > 0");
  }
  if (j.contains("saturation") && !j.at("saturation").is_null()) {
    const json& sat = j.at("saturation");
    allow_keys(sat, "controller.saturation", {"force", "torque"});
    WrenchSaturation w{INFINITY, INFINITY};
    read(sat, "controller.saturation", "force", w.force);
    read(sat, "controller.saturation", "torque", w.torque);
    if (!(w.force > 0.0)) throw ConfigError("controller.saturation.force", "must be > 0");
    if (!(w.torque > 0.0)) throw ConfigError("controller.saturation.torque", "must be > 0");
    c.saturation = w;
  }
  if (c.kind != ControllerKind::passive) {
    try {
      c.gains.validate();
    } catch (const ConfigError& e) {
      throw ConfigError("controller." + e.field(), "must be a finite value > 0");
    }
  }
  if (!(c.kpsi >= 0.0)) throw ConfigError("controller.kpsi", "must be >= 0");
}

inline DisturbanceEvent parse_disturbance(const json& j, const std::string& path) {
  allow_keys(j, path, {"type", "start", "duration", "force", "torque", "freq_hz", "pulses", "period", "width"});
  DisturbanceEvent e;
  if (!j.contains("type")) throw ConfigError(path + ".type", "is required");
  e.kind = choice(j, path, "type", e.kind,
                  {{"impulse", DisturbanceKind::impulse}, {"step", DisturbanceKind::step},
                   {"sinusoid", DisturbanceKind::sinusoid}, {"jerk", DisturbanceKind::jerk}});
  read(j, path, "start", e.start);
  read(j, path, "duration", e.duration);
  if (j.contains("force")) e.force = vec3(j.at("force"), path + ".force");
  if (j.contains("torque")) e.torque = vec3(j.at("torque"), path + ".torque");
  read(j, path, "freq_hz", e.frequency_hz);
  read(j, path, "pulses", e.pulses);
  read(j, path, "period", e.period);
  read(j, path, "width", e.width);
  e.validate();
  return e;
}

inline void parse_sim(const json& j, SimOptions& sim) {
  const std::string path = "sim";
  allow_keys(j, path, {"dt", "duration", "control_rate", "seed", "record_stride"});
  read(j, path, "dt", sim.dt);
  read(j, path, "duration", sim.duration);
  read(j, path, "control_rate", sim.control_rate);
  read(j, path, "seed", sim.seed);
  read(j, path, "record_stride", sim.record_stride);
  sim.validate();
}

inline void parse_weights(const json& j, LqrWeights& w) {
  const std::string path = "weights";
  allow_keys(j, path, {"q", "r", "sigma"});
  if (j.contains("q")) {
    const auto q = numbers(j.at("q"), "weights.q", 5);
    w.Q = Eigen::Map<const Eigen::VectorXd>(q.data(), 5).asDiagonal();
  }
  if (j.contains("r")) {
    const auto r = numbers(j.at("r"), "weights.r", 2);
    w.R_base = Eigen::Map<const Eigen::VectorXd>(r.data(), 2).asDiagonal();
  }
  read(j, path, "sigma", w.sigma);
  w.validate(5, 2);
}

inline void parse_synthesis(const json& j, SynthesisOptions& o) {
  const std::string path = "synthesis";
  allow_keys(j, path, {"max_iter", "tol", "xi_init", "structure", "epsilon"});
  read(j, path, "max_iter", o.max_iter);
  read(j, path, "tol", o.tol);
  read(j, path, "epsilon", o.epsilon);
  o.xi_init = choice(j, path, "xi_init", o.xi_init,
                     {{"lyapunov", XiInit::lyapunov}, {"riccati", XiInit::riccati}, {"identity", XiInit::identity}});
  o.structure = choice(j, path, "structure", o.structure,
                       {{"diagonal", GainStructure::diagonal}, {"dense", GainStructure::dense}});
  if (o.max_iter < 1) throw ConfigError("synthesis.max_iter", "must be >= 1");
  if (!(o.tol > 0.0)) throw ConfigError("synthesis.tol", "must be > 0");
  if (!(o.epsilon >= 0.0)) throw ConfigError("synthesis.epsilon", "must be >= 0");
}

inline void parse_sweep(const json& j, SweepConfig& s) {
  const std::string path = "sweep";
  allow_keys(j, path, {"sigma_min", "sigma_max", "points"});
  read(j, path, "sigma_min", s.sigma_min);
  read(j, path, "sigma_max", s.sigma_max);
  read(j, path, "points", s.points);
  if (!(s.sigma_min > 0.0)) throw ConfigError("sweep.sigma_min", "must be > 0");
  if (!(s.sigma_max >= s.sigma_min)) throw ConfigError("sweep.sigma_max", "must be >= sigma_min");
  if (s.points < 1) throw ConfigError("sweep.points", "must be >= 1");
}

inline void parse_grid(const json& j, GridSpec& g, GridOptions& o) {
  const std::string path = "grid";
  allow_keys(j, path, {"l1", "angles_deg", "rates", "energy_tolerance", "time_budget", "settling_threshold", "threads"});
  if (j.contains("l1")) g.l1_values = numbers(j.at("l1"), "grid.l1");
  if (j.contains("angles_deg")) g.angles_deg = numbers(j.at("angles_deg"), "grid.angles_deg");
  if (j.contains("rates")) g.rates = numbers(j.at("rates"), "grid.rates");
  read(j, path, "energy_tolerance", o.energy_tolerance);
  read(j, path, "time_budget", o.time_budget);
  read(j, path, "settling_threshold", o.settling_threshold);
  read(j, path, "threads", o.threads);
  g.validate();
  o.validate();
}

inline void parse_spectrum(const json& j, SpectrumConfig& s) {
  const std::string path = "spectrum";
  allow_keys(j, path, {"signal", "undamped", "relative_threshold", "min_separation_bins"});
  read(j, path, "signal", s.signal);
  read(j, path, "undamped", s.undamped);
  read(j, path, "relative_threshold", s.peaks.relative_threshold);
  read(j, path, "min_separation_bins", s.peaks.min_separation_bins);
  if (!(s.peaks.relative_threshold > 0.0 && s.peaks.relative_threshold < 1.0)) {
    throw ConfigError("spectrum.relative_threshold", "must be in (0, 1)");
  }
  if (s.peaks.min_separation_bins < 1) throw ConfigError("spectrum.min_separation_bins", "must be >= 1");
}

inline void parse_compare(const json& j, std::vector<ControllerKind>& out) {
  allow_keys(j, "compare", {"controllers"});
  if (!j.contains("controllers")) return;
  const json& list = j.at("controllers");
  if (!list.is_array() || list.empty()) throw ConfigError("compare.controllers", "must be a non-empty array");
  out.clear();
  for (const auto& v : list) {
    const json wrapper = {{"type", v}};
    const auto kind = choice(wrapper, "compare.controllers", "type", ControllerKind::proposed,
                             {{"proposed", ControllerKind::proposed}, {"ideal", ControllerKind::ideal},
                              {"passive", ControllerKind::passive}});
    if (std::find(out.begin(), out.end(), kind) != out.end()) throw ConfigError("compare.controllers", "duplicate entry");
    out.push_back(kind);
  }
}

}  // namespace detail

/// Parses and validates a scenario document. Unknown keys are errors.
inline Scenario parse_scenario(const std::string& text) {
  using detail::json;
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("config", std::string("invalid JSON: ") + e.what());
  }
  detail::allow_keys(j, "", {"name", "model", "params", "initial", "controller", "disturbances", "sim", "metrics",
                             "weights", "synthesis", "sweep", "grid", "spectrum", "compare"});
  Scenario s;
  detail::read(j, "", "name", s.name);
  s.model = detail::choice(j, "", "model", s.model, {{"planar", ModelKind::planar}, {"spatial", ModelKind::spatial}});
  if (j.contains("params")) detail::parse_params(j.at("params"), s.params);
  if (j.contains("initial")) detail::parse_initial(j.at("initial"), s);
  if (j.contains("sim")) detail::parse_sim(j.at("sim"), s.sim);
  if (j.contains("controller")) detail::parse_controller(j.at("controller"), s);
  if (j.contains("disturbances")) {
    const json& d = j.at("disturbances");
    if (!d.is_array()) throw ConfigError("disturbances", "must be an array");
    for (std::size_t i = 0; i < d.size(); ++i) {
      s.disturbances.push_back(detail::parse_disturbance(d[i], "disturbances[" + std::to_string(i) + "]"));
    }
  }
  if (j.contains("metrics")) {
    detail::allow_keys(j.at("metrics"), "metrics", {"settling_threshold"});
    detail::read(j.at("metrics"), "metrics", "settling_threshold", s.settling_threshold);
    if (!(s.settling_threshold > 0.0 && s.settling_threshold < 1.0)) {
      throw ConfigError("metrics.settling_threshold", "must be in (0, 1)");
    }
  }
  if (j.contains("weights")) detail::parse_weights(j.at("weights"), s.weights);
  if (j.contains("synthesis")) detail::parse_synthesis(j.at("synthesis"), s.synthesis);
  if (j.contains("sweep")) detail::parse_sweep(j.at("sweep"), s.sweep);
  if (j.contains("grid")) detail::parse_grid(j.at("grid"), s.grid, s.grid_options);
  if (j.contains("spectrum")) detail::parse_spectrum(j.at("spectrum"), s.spectrum);
  if (j.contains("compare")) detail::parse_compare(j.at("compare"), s.compare);
  s.resolve_tau();
  s.grid_options.sim = s.sim;
  return s;
}

inline Scenario load_scenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read config " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("failed reading config " + path);
  return parse_scenario(buf.str());
}

}  // namespace samdamp::io
