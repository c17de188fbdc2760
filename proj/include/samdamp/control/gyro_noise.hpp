#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include <Eigen/Dense>

namespace samdamp {

/// Rate noise density of the reference IMU gyro [deg/s/sqrt(Hz)].
inline constexpr double kGyroNoiseDensityDeg = 0.009;

/// Additive white Gaussian gyro noise; per-sample sigma = density * sqrt(rate).
class GyroNoise {
 public:
  GyroNoise(double sample_rate_hz, std::uint64_t seed, double density_deg = kGyroNoiseDensityDeg)
      : sigma_(density_deg * std::numbers::pi / 180.0 * std::sqrt(sample_rate_hz)), rng_(seed) {}

  double sigma() const { return sigma_; }

  double sample() { return sigma_ * normal_(rng_); }

  void apply(double& w) { w += sample(); }
  void apply(Eigen::Vector3d& w) {
    for (int i = 0; i < 3; ++i) w[i] += sample();
  }

 private:
  double sigma_;
  std::mt19937_64 rng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace samdamp
