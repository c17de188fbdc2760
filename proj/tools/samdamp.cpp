// samdamp: command-line driver for the simulation, synthesis and analysis runs.

#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "samdamp/analysis/compare.hpp"
#include "samdamp/analysis/cost.hpp"
#include "samdamp/analysis/grid.hpp"
#include "samdamp/analysis/settling.hpp"
#include "samdamp/analysis/spectrum.hpp"
#include "samdamp/dynamics/linear_model.hpp"
#include "samdamp/dynamics/modes.hpp"
#include "samdamp/io/csv.hpp"
#include "samdamp/io/scenario.hpp"
#include "samdamp/synthesis/certify.hpp"
#include "samdamp/synthesis/output_feedback.hpp"

namespace fs = std::filesystem;
using namespace samdamp;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitIo = 4;

// Reference gains the synthesis summary compares against.
constexpr double kReferenceKv = 48.0;
constexpr double kReferenceKw = 70.0;

struct Options {
  std::string config;
  std::string out = ".";
  std::optional<std::uint64_t> seed;
  std::optional<double> sigma;
  std::optional<int> max_iter;
  std::optional<double> tol;
  std::optional<std::string> xi_init;
  bool quiet = false;
};

/// Key/value summary written to summary.txt and echoed unless --quiet.
class Summary {
 public:
  template <class T>
  void add(const std::string& key, const T& value) {
    std::ostringstream s;
    s << value;
    lines_.push_back(key + " = " + s.str());
  }
  void add(const std::string& key, double value) { lines_.push_back(key + " = " + io::format_double(value)); }
  void add(const std::string& key, bool value) { lines_.push_back(key + " = " + (value ? "true" : "false")); }

  void write(const fs::path& dir, bool quiet) const {
    std::string text;
    for (const auto& l : lines_) text += l + "\n";
    const fs::path path = dir / "summary.txt";
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out || !(out << text).flush()) throw IoError("failed writing " + path.string());
    if (!quiet) std::cout << text;
  }

 private:
  std::vector<std::string> lines_;
};

io::Scenario load(const Options& o) {
  io::Scenario s = io::load_scenario(o.config);
  if (o.seed) s.sim.seed = *o.seed;
  if (o.sigma) {
    if (!(*o.sigma > 0.0) || !std::isfinite(*o.sigma)) throw ConfigError("sigma", "must be a finite value > 0");
    s.weights.sigma = *o.sigma;
  }
  if (o.max_iter) {
    if (*o.max_iter < 1) throw ConfigError("max-iter", "must be >= 1");
    s.synthesis.max_iter = *o.max_iter;
  }
  if (o.tol) {
    if (!(*o.tol > 0.0)) throw ConfigError("tol", "must be > 0");
    s.synthesis.tol = *o.tol;
  }
  if (o.xi_init) {
    if (*o.xi_init == "identity") s.synthesis.xi_init = XiInit::identity;
    else if (*o.xi_init == "riccati") s.synthesis.xi_init = XiInit::riccati;
    else if (*o.xi_init == "lyapunov") s.synthesis.xi_init = XiInit::lyapunov;
    else throw ConfigError("xi-init", "must be one of identity|riccati|lyapunov");
  }
  s.grid_options.sim = s.sim;
  return s;
}

fs::path prepare_out(const Options& o) {
  std::error_code ec;
  fs::create_directories(o.out, ec);
  if (ec || !fs::is_directory(o.out)) throw IoError("cannot create output directory " + o.out);
  return o.out;
}

std::string model_name(io::ModelKind m) { return m == io::ModelKind::planar ? "planar" : "spatial"; }

void describe(Summary& sum, const io::Scenario& s) {
  if (!s.name.empty()) sum.add("scenario", s.name);
  sum.add("model", model_name(s.model));
  sum.add("controller", io::to_string(s.controller.kind));
  sum.add("kv", s.controller.gains.kv);
  sum.add("kw", s.controller.gains.kw);
  sum.add("cutoff_hz", s.cutoff_hz);
  sum.add("tau_s", s.controller.tau);
}

/// True when E(t + T) < E(t) for every recorded t >= from with E(t) above
/// 1e-9 J, T being one slow-mode period. The filtered law can inject power
/// for part of a cycle, so sample-to-sample monotonicity is too strict.
template <class Plant>
bool decays_per_period(const Trajectory<Plant>& traj, double from, double slow_hz) {
  const auto& x = traj.samples;
  if (x.size() < 2) return true;
  const double step = x[1].t - x[0].t;
  const auto lag = static_cast<std::size_t>(std::lround(1.0 / (slow_hz * step)));
  for (std::size_t k = 0; k + lag < x.size(); ++k) {
    if (x[k].t < from || x[k].energy <= 1e-9) continue;
    if (!(x[k + lag].energy < x[k].energy)) return false;
  }
  return true;
}

/// Summary metrics shared by the planar and spatial simulate runs.
template <class Plant, class RateNorm>
void trajectory_metrics(Summary& sum, const io::Scenario& s, const Trajectory<Plant>& traj, RateNorm rate) {
  std::vector<double> t, w;
  double peak = 0.0;
  for (const auto& x : traj.samples) {
    t.push_back(x.t);
    w.push_back(rate(x));
    peak = std::max(peak, w.back());
  }
  sum.add("samples", traj.size());
  sum.add("initial_energy_J", traj.samples.front().energy);
  sum.add("final_energy_J", traj.back().energy);
  sum.add("peak_wb_rad_s", peak);

  // Settling and energy audit after the last disturbance ends.
  const double quiet_from = schedule_end(s.disturbances);
  std::vector<double> tq, wq;
  bool monotone = true;
  double last = INFINITY;
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (t[k] < quiet_from) continue;
    tq.push_back(t[k]);
    wq.push_back(w[k]);
    const double e = traj.samples[k].energy;
    if (e > last + 1e-12 * std::max(1.0, std::abs(last))) monotone = false;
    last = e;
  }
  sum.add("disturbance_end_s", quiet_from);
  sum.add("energy_non_increasing_after_disturbance", monotone);
  sum.add("energy_decreasing_over_slow_period", decays_per_period(traj, quiet_from, mode_frequencies(s.params).slow_hz));
  const auto ts = settling_time(tq, wq, s.settling_threshold);
  sum.add("settling_threshold", s.settling_threshold);
  if (ts) {
    sum.add("settling_time_s", *ts - (tq.empty() ? 0.0 : tq.front()));
  } else {
    sum.add("settling_time_s", std::string("not settled"));
  }
}

int run_simulate(const Options& o) {
  const io::Scenario s = load(o);
  const fs::path dir = prepare_out(o);
  Summary sum;
  describe(sum, s);
  const double period = s.sim.control_steps() * s.sim.dt;
  if (s.model == io::ModelKind::planar) {
    PlanarPlant plant{s.params};
    auto law = make_controller<double>(s.controller, s.params, period);
    const auto traj = simulate(plant, s.planar_initial, law, planar_disturbance(s.disturbances), s.sim);
    io::trajectory_table(plant, traj).save((dir / "trajectory.csv").string());
    trajectory_metrics(sum, s, traj, [](const auto& x) { return std::abs(x.twist.w_b); });
    sum.add("quadratic_cost", trajectory_cost(traj, s.weights));
  } else {
    SpatialPlant plant{s.params};
    auto law = make_controller<Eigen::Vector3d>(s.controller, s.params, period);
    const auto traj = simulate(plant, s.spatial_initial, law, spatial_disturbance(s.disturbances), s.sim);
    io::trajectory_table(plant, traj).save((dir / "trajectory.csv").string());
    trajectory_metrics(sum, s, traj, [](const auto& x) { return x.twist.w_b.norm(); });
  }
  sum.write(dir, o.quiet);
  return 0;
}

io::CsvTable sweep_table() { return io::CsvTable({"sigma", "kv", "kw", "cost", "feasible", "iterations", "max_eig_M"}); }

void sweep_row(io::CsvTable& table, const SweepRow& r) {
  table.add_row_raw({io::format_double(r.sigma), io::format_double(r.kv), io::format_double(r.kw),
                     io::format_double(r.cost), r.feasible ? "1" : "0", std::to_string(r.iterations),
                     io::format_double(r.max_eig_M)});
}

int run_synthesize(const Options& o) {
  const io::Scenario s = load(o);
  const fs::path dir = prepare_out(o);
  const LinearModel model = linearize(s.params, s.controller.tau);
  const SynthesisResult r = solve_output_feedback_lqr(model, s.weights, s.synthesis);
  const Certificate cert = certify(model, r.F, s.weights);

  io::CsvTable table = sweep_table();
  sweep_row(table, {s.weights.sigma, r.kv(), r.kw(), r.cost, r.feasible, r.iterations, r.max_eig_M, {}, {}});
  table.save((dir / "gains.csv").string());

  Summary sum;
  if (!s.name.empty()) sum.add("scenario", s.name);
  sum.add("sigma", s.weights.sigma);
  sum.add("cutoff_hz", s.cutoff_hz);
  sum.add("tau_s", s.controller.tau);
  sum.add("xi_init", to_string(r.xi_used));
  sum.add("kv", r.kv());
  sum.add("kw", r.kw());
  sum.add("trace_P", r.cost);
  sum.add("feasible", r.feasible);
  sum.add("converged", r.converged);
  sum.add("iterations", r.iterations);
  sum.add("hurwitz", cert.hurwitz);
  sum.add("max_eig_M", r.max_eig_M);
  sum.add("min_eig_P", r.min_eig_P);
  double slowest = -INFINITY;
  for (const auto& ev : cert.eigenvalues) slowest = std::max(slowest, ev.real());
  sum.add("max_real_eigenvalue", slowest);
  sum.add("reference_kv", kReferenceKv);
  sum.add("reference_kw", kReferenceKw);
  sum.add("kv_ratio_to_reference", r.kv() / kReferenceKv);
  sum.add("kw_ratio_to_reference", r.kw() / kReferenceKw);
  if (!r.diagnostics.empty()) sum.add("diagnostics", r.diagnostics);
  sum.write(dir, o.quiet);
  return 0;
}

int run_sweep(const Options& o) {
  const io::Scenario s = load(o);
  const fs::path dir = prepare_out(o);
  const LinearModel model = linearize(s.params, s.controller.tau);
  const auto rows = sigma_sweep(model, s.weights, s.sweep.sigmas(), s.synthesis);
  io::CsvTable table = sweep_table();
  int feasible = 0;
  bool kv_mono = true, kw_mono = true;
  const SweepRow* prev = nullptr;
  for (const auto& r : rows) {
    sweep_row(table, r);
    if (!r.feasible) continue;
    ++feasible;
    if (prev) {
      kv_mono = kv_mono && r.kv <= prev->kv;
      kw_mono = kw_mono && r.kw <= prev->kw;
    }
    prev = &r;
  }
  table.save((dir / "sweep.csv").string());
  Summary sum;
  if (!s.name.empty()) sum.add("scenario", s.name);
  sum.add("cutoff_hz", s.cutoff_hz);
  sum.add("points", rows.size());
  sum.add("feasible_points", feasible);
  sum.add("kv_non_increasing", kv_mono);
  sum.add("kw_non_increasing", kw_mono);
  sum.write(dir, o.quiet);
  return feasible == static_cast<int>(rows.size()) ? 0 : kExitNumerical;
}

template <class Plant, class Pick>
Spectrum spectrum_of(const Trajectory<Plant>& traj, Pick pick, const PeakOptions& peaks) {
  std::vector<double> t, y;
  for (const auto& x : traj.samples) {
    t.push_back(x.t);
    y.push_back(pick(x));
  }
  return power_spectrum(t, y, peaks);
}

int run_spectrum(const Options& o) {
  const io::Scenario s = load(o);
  const fs::path dir = prepare_out(o);
  const PendulumParams p = s.spectrum.undamped ? s.params.undamped() : s.params;
  const double period = s.sim.control_steps() * s.sim.dt;
  const std::string& sig = s.spectrum.signal;
  Spectrum spec;
  if (s.model == io::ModelKind::planar) {
    PlanarPlant plant{p};
    auto law = make_controller<double>(s.controller, p, period);
    const auto traj = simulate(plant, s.planar_initial, law, planar_disturbance(s.disturbances), s.sim);
    std::function<double(const TrajectorySample<PlanarPlant>&)> pick;
    if (sig == "wb") pick = [](const auto& x) { return x.twist.w_b; };
    else if (sig == "theta") pick = [](const auto& x) { return x.state.theta(); };
    else if (sig == "q1") pick = [](const auto& x) { return x.state.q1; };
    else if (sig == "q2") pick = [](const auto& x) { return x.state.q2; };
    else throw ConfigError("spectrum.signal", "planar signals are wb|theta|q1|q2");
    spec = spectrum_of(traj, pick, s.spectrum.peaks);
  } else {
    SpatialPlant plant{p};
    auto law = make_controller<Eigen::Vector3d>(s.controller, p, period);
    const auto traj = simulate(plant, s.spatial_initial, law, spatial_disturbance(s.disturbances), s.sim);
    int axis = -1;
    if (sig == "wbx") axis = 0;
    else if (sig == "wby" || sig == "wb") axis = 1;
    else if (sig == "wbz") axis = 2;
    else throw ConfigError("spectrum.signal", "spatial signals are wb|wbx|wby|wbz");
    spec = spectrum_of(traj, [axis](const auto& x) { return x.twist.w_b[axis]; }, s.spectrum.peaks);
  }
  io::CsvTable table({"freq_hz", "power"});
  for (std::size_t k = 0; k < spec.frequency_hz.size(); ++k) table.add_row({spec.frequency_hz[k], spec.power[k]});
  table.save((dir / "spectrum.csv").string());

  const ModeFrequencies modes = mode_frequencies(p);
  Summary sum;
  describe(sum, s);
  sum.add("signal", sig);
  sum.add("resolution_hz", spec.resolution_hz);
  sum.add("predicted_slow_hz", modes.slow_hz);
  sum.add("predicted_fast_hz", modes.fast_hz);
  sum.add("peaks", spec.peaks.size());
  for (std::size_t i = 0; i < spec.peaks.size(); ++i) {
    sum.add("peak" + std::to_string(i + 1) + "_hz", spec.peaks[i].frequency_hz);
    sum.add("peak" + std::to_string(i + 1) + "_power", spec.peaks[i].power);
  }
  sum.write(dir, o.quiet);
  return 0;
}

int run_grid(const Options& o) {
  const io::Scenario s = load(o);
  const fs::path dir = prepare_out(o);
  const StabilityGridReport rep = stability_grid(s.params, s.grid, s.controller, s.grid_options);
  io::CsvTable table({"l1", "angle_deg", "rate", "converged", "settling_s", "peak_force", "peak_torque"});
  int converged = 0;
  double worst = 0.0;
  for (const auto& c : rep.cells) {
    table.add_row_raw({io::format_double(c.l1), io::format_double(c.angle_deg), io::format_double(c.rate),
                       c.converged ? "1" : "0", io::format_double(c.settling_s), io::format_double(c.peak_force),
                       io::format_double(c.peak_torque)});
    if (c.converged) ++converged;
    if (std::isfinite(c.settling_s)) worst = std::max(worst, c.settling_s);
  }
  table.save((dir / "grid.csv").string());
  Summary sum;
  describe(sum, s);
  sum.add("cells", rep.cells.size());
  sum.add("converged_cells", converged);
  sum.add("all_converged", rep.all_converged());
  sum.add("energy_tolerance_J", s.grid_options.energy_tolerance);
  sum.add("time_budget_s", s.grid_options.time_budget);
  sum.add("max_settling_s", worst);
  for (const auto& c : rep.cells) {
    if (!c.diagnostic.empty()) {
      sum.add("cell_l1_" + io::format_double(c.l1) + "_angle_" + io::format_double(c.angle_deg) + "_rate_" +
                  io::format_double(c.rate),
              c.diagnostic);
    }
  }
  sum.write(dir, o.quiet);
  return rep.all_converged() ? 0 : kExitNumerical;
}

template <class Plant, class RateNorm>
void compare_metrics(Summary& sum, const io::Scenario& s, const ComparisonBundle<Plant>& b, RateNorm rate) {
  const double from = schedule_end(s.disturbances);
  for (const auto& r : b.runs) {
    std::vector<double> t, w;
    double peak = 0.0;
    for (const auto& x : r.trajectory.samples) {
      if (x.t < from) continue;
      t.push_back(x.t);
      w.push_back(rate(x));
      peak = std::max(peak, w.back());
    }
    sum.add(r.name + "_peak_wb_after_disturbance", peak);
    const auto ts = settling_time(t, w, s.settling_threshold);
    if (ts) sum.add(r.name + "_settling_time_s", *ts - (t.empty() ? 0.0 : t.front()));
    else sum.add(r.name + "_settling_time_s", std::string("not settled"));
    sum.add(r.name + "_final_energy_J", r.trajectory.back().energy);
  }
}

int run_compare(const Options& o) {
  const io::Scenario s = load(o);
  const fs::path dir = prepare_out(o);
  std::vector<NamedController> ctrls;
  for (ControllerKind k : s.compare) {
    ControllerConfig c = s.controller;
    c.kind = k;
    ctrls.push_back({io::to_string(k), c});
  }
  Summary sum;
  describe(sum, s);
  if (s.model == io::ModelKind::planar) {
    PlanarPlant plant{s.params};
    const auto b = compare_controllers(plant, s.planar_initial, s.disturbances, ctrls, s.sim);
    comparison_table(plant, b).save((dir / "compare.csv").string());
    compare_metrics(sum, s, b, [](const auto& x) { return std::abs(x.twist.w_b); });
  } else {
    SpatialPlant plant{s.params};
    const auto b = compare_controllers(plant, s.spatial_initial, s.disturbances, ctrls, s.sim);
    comparison_table(plant, b).save((dir / "compare.csv").string());
    compare_metrics(sum, s, b, [](const auto& x) { return x.twist.w_b.norm(); });
  }
  sum.write(dir, o.quiet);
  return 0;
}

int report(const Error& e) {
  std::cerr << "error[" << to_string(e.category()) << "]: " << e.what() << "\n";
  switch (e.category()) {
    case ErrorCategory::config: return kExitConfig;
    case ErrorCategory::numerical: return kExitNumerical;
    case ErrorCategory::io: return kExitIo;
  }
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Oscillation damping toolkit for a cable-suspended platform"};
  app.require_subcommand(1);
  app.fallthrough();

  Options o;
  app.add_option("--config", o.config, "Scenario file (JSON)")->required();
  app.add_option("--out", o.out, "Output directory, created if missing")->capture_default_str();
  app.add_option("--seed", o.seed, "Noise seed (u64), overrides sim.seed");
  app.add_option("--sigma", o.sigma, "Input weight multiplier, overrides weights.sigma");
  app.add_option("--max-iter", o.max_iter, "Maximum Xi updates in synthesis");
  app.add_option("--tol", o.tol, "Relative trace(P) tolerance for synthesis convergence");
  app.add_option("--xi-init", o.xi_init, "Initial convexification matrix {identity|riccati|lyapunov}");
  app.add_flag("--quiet", o.quiet, "Do not echo the summary to stdout");

  struct Command {
    const char* name;
    const char* help;
    int (*run)(const Options&);
  };
  const Command commands[] = {
      {"simulate", "Run one scenario; writes trajectory.csv", run_simulate},
      {"synthesize", "Output-feedback LQR gains and certificate; writes gains.csv", run_synthesize},
      {"sweep", "Synthesis over a sigma grid; writes sweep.csv", run_sweep},
      {"spectrum", "Free-swing power spectrum; writes spectrum.csv", run_spectrum},
      {"grid", "Closed-loop stability grid; writes grid.csv", run_grid},
      {"compare", "Side-by-side controller runs; writes compare.csv", run_compare},
  };
  for (const auto& c : commands) app.add_subcommand(c.name, c.help);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return e.get_exit_code() == 0 ? code : kExitConfig;
  }

  try {
    for (const auto& c : commands) {
      if (app.got_subcommand(c.name)) return c.run(o);
    }
  } catch (const Error& e) {
    return report(e);
  } catch (const std::exception& e) {
    std::cerr << "error[numerical]: " << e.what() << "\n";
    return kExitNumerical;
  }
  return 0;
}
