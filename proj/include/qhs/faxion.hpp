#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace qhs {

// Lab-frame axion lineshape: f(nu) ~ sqrt(nu - nu_a) exp(-3(nu-nu_a)/(nu_a <b^2>))
// for nu >= nu_a, a Gamma(3/2) density in the offset with scale
// theta = nu_a <b^2> / 3.
struct AxionLineshape {
  double rest_frequency = 0.0;       // Hz
  double velocity_parameter = 0.0;   // <beta^2>

  double theta() const { return rest_frequency * velocity_parameter / 3.0; }
  double pdf(double frequency) const;       // 1/Hz
  double cdf(double frequency) const;
  double inv_cdf(double p) const;           // Hz
  double width_1e() const;                  // full width at f_max/e
  double mode_offset() const { return 0.5 * theta(); }

  void validate() const;
};

struct FaxionConfig {
  double update_rate = 1.5e3;       // Hz, frequency hops per second
  double modulation_depth = 30e3;   // Hz, the lineshape 1/e width maps onto this
  double carrier_power = 0.01;      // calibration target: peak PSD at the
                                    // measurement port in vacuum units, under
                                    // the critically-coupled reference setup
  AxionLineshape lineshape;

  // frequency-offset scale applied to sampled lineshape offsets
  double offset_scale() const { return modulation_depth / lineshape.width_1e(); }

  void validate() const;
};

std::vector<double> sample_frequencies(const AxionLineshape& shape, size_t count, uint64_t seed);

struct FrequencyTrack {
  std::vector<double> sample_times;             // s, spaced 1/update_rate
  std::vector<double> instantaneous_frequencies;  // Hz, offsets from the carrier
};

// Piecewise-constant FM track over [0, duration); carrier in Hz gives the
// track an absolute origin (offsets are added to it).
FrequencyTrack synthesize_track(const FaxionConfig& config, double duration, double carrier,
                                uint64_t seed);

// Expected single-sided PSD envelope of the FM tone vs offset from the
// carrier, normalized to unit integral. Bin spacing = resolution.
struct SpectralEnvelope {
  double resolution = 0.0;      // Hz
  double offset_origin = 0.0;   // Hz of bin 0
  std::vector<double> density;  // 1/Hz; sum(density)*resolution == 1

  double offset(size_t i) const { return offset_origin + resolution * static_cast<double>(i); }
  double density_at(double offset_hz) const;
  double peak_density() const;
  double peak_offset() const;
  // smallest window [lo, hi] (Hz) containing all bins above frac*peak
  void support(double frac, double* lo, double* hi) const;
};

SpectralEnvelope spectral_envelope(const FaxionConfig& config, double resolution,
                                   double sim_seconds = 20.0, uint64_t seed = 0x5eedf00d);

uint64_t faxion_config_hash(const FaxionConfig& config, double resolution);

// File-backed cache (CSV + JSON header keyed by config hash).
SpectralEnvelope cached_envelope(const FaxionConfig& config, double resolution,
                                 const std::string& cache_dir, bool force_regen = false,
                                 uint64_t seed = 0x5eedf00d);

}  // namespace qhs
