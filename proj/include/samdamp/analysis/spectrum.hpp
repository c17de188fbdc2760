#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <vector>

#include <fftw3.h>

#include "samdamp/errors.hpp"

namespace samdamp {

struct SpectralPeak {
  double frequency_hz = 0.0;
  double power = 0.0;
};

struct Spectrum {
  std::vector<double> frequency_hz;  ///< 0 .. Nyquist, strictly increasing
  std::vector<double> power;         ///< one-sided PSD
  std::vector<SpectralPeak> peaks;   ///< sorted by decreasing power
  double resolution_hz = 0.0;        ///< bin spacing fs / N
};

struct PeakOptions {
  double relative_threshold = 0.1;  ///< of the maximum power
  int min_separation_bins = 2;
};

/// Local maxima above the relative threshold, strongest first, at least
/// `min_separation_bins` apart.
inline std::vector<SpectralPeak> find_peaks(const std::vector<double>& f, const std::vector<double>& p,
                                            const PeakOptions& opt = {}) {
  std::vector<SpectralPeak> out;
  if (p.size() < 3) return out;
  const double pmax = *std::max_element(p.begin(), p.end());
  if (!(pmax > 0.0)) return out;
  std::vector<std::size_t> candidates;
  for (std::size_t k = 1; k + 1 < p.size(); ++k) {
    if (p[k] > p[k - 1] && p[k] >= p[k + 1] && p[k] >= opt.relative_threshold * pmax) candidates.push_back(k);
  }
  std::sort(candidates.begin(), candidates.end(), [&](std::size_t a, std::size_t b) { return p[a] > p[b]; });
  std::vector<std::size_t> kept;
  for (std::size_t k : candidates) {
    const bool far = std::all_of(kept.begin(), kept.end(), [&](std::size_t j) {
      return std::abs(static_cast<long>(k) - static_cast<long>(j)) >= opt.min_separation_bins;
    });
    if (far) {
      kept.push_back(k);
      out.push_back({f[k], p[k]});
    }
  }
  return out;
}

/// Periodogram of the linearly detrended, Hann-windowed signal.
inline Spectrum power_spectrum(std::span<const double> signal, double sample_rate_hz, const PeakOptions& peaks = {}) {
  const std::size_t n = signal.size();
  if (n < 2) throw SamplingError("power_spectrum needs at least 2 samples");
  if (!(sample_rate_hz > 0.0)) throw SamplingError("sample rate must be > 0");

  // Least-squares line through (k, x_k).
  const double nd = static_cast<double>(n);
  const double kmean = 0.5 * (nd - 1.0);
  double xmean = 0.0;
  for (double v : signal) xmean += v;
  xmean /= nd;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double dk = static_cast<double>(k) - kmean;
    sxy += dk * (signal[k] - xmean);
    sxx += dk * dk;
  }
  const double slope = sxx > 0.0 ? sxy / sxx : 0.0;

  std::vector<double> work(n);
  double wsum = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double w = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(k) / (nd - 1.0));
    const double detrended = signal[k] - xmean - slope * (static_cast<double>(k) - kmean);
    work[k] = w * detrended;
    wsum += w * w;
  }

  const std::size_t bins = n / 2 + 1;
  std::vector<std::complex<double>> out(bins);
  fftw_plan plan = fftw_plan_dft_r2c_1d(static_cast<int>(n), work.data(),
                                        reinterpret_cast<fftw_complex*>(out.data()), FFTW_ESTIMATE);
  fftw_execute(plan);
  fftw_destroy_plan(plan);

  Spectrum s;
  s.resolution_hz = sample_rate_hz / nd;
  s.frequency_hz.resize(bins);
  s.power.resize(bins);
  const double norm = 1.0 / (sample_rate_hz * wsum);
  for (std::size_t k = 0; k < bins; ++k) {
    s.frequency_hz[k] = static_cast<double>(k) * s.resolution_hz;
    const bool edge = k == 0 || (n % 2 == 0 && k == bins - 1);
    s.power[k] = std::norm(out[k]) * norm * (edge ? 1.0 : 2.0);
  }
  s.peaks = find_peaks(s.frequency_hz, s.power, peaks);
  return s;
}

/// As above, taking timestamps; rejects non-uniform sampling.
inline Spectrum power_spectrum(std::span<const double> times, std::span<const double> signal,
                               const PeakOptions& peaks = {}) {
  if (times.size() != signal.size()) throw SamplingError("times and signal differ in length");
  if (times.size() < 2) throw SamplingError("power_spectrum needs at least 2 samples");
  const double dt = (times.back() - times.front()) / static_cast<double>(times.size() - 1);
  if (!(dt > 0.0)) throw SamplingError("timestamps must increase");
  for (std::size_t k = 1; k < times.size(); ++k) {
    if (std::abs((times[k] - times[k - 1]) - dt) > 1e-6 * dt) throw SamplingError("timestamps are not uniform");
  }
  return power_spectrum(signal, 1.0 / dt, peaks);
}

}  // namespace samdamp
