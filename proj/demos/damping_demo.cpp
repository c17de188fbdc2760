// Planar free swing from 5 deg: energy with and without the filtered damping law.

#include <cstdio>

#include "samdamp/control/cutoff.hpp"
#include "samdamp/dynamics/integrator.hpp"
#include "samdamp/dynamics/modes.hpp"

int main() {
  using namespace samdamp;
  const PendulumParams p;
  const ModeFrequencies modes = mode_frequencies(p);
  std::printf("modes: slow %.4f Hz, fast %.4f Hz\n", modes.slow_hz, modes.fast_hz);

  const PlanarState start{0.0873, 0.0873, 0.0, 0.0};
  SimOptions opt;
  opt.duration = 20.0;
  opt.record_stride = 5000;

  ControllerConfig on;
  on.tau = cutoff_from_hz(0.76).tau;
  ControllerConfig off = on;
  off.kind = ControllerKind::passive;

  PlanarPlant plant{p};
  const double period = opt.control_steps() * opt.dt;
  const auto a = simulate(plant, start, make_controller<double>(on, p, period), {}, opt);
  const auto b = simulate(plant, start, make_controller<double>(off, p, period), {}, opt);
  std::printf("%6s %14s %14s\n", "t [s]", "damped [J]", "passive [J]");
  for (std::size_t k = 0; k < a.size(); ++k) {
    std::printf("%6.1f %14.6g %14.6g\n", a.samples[k].t, a.samples[k].energy, b.samples[k].energy);
  }
}
