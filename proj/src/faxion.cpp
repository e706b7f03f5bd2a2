#include "qhs/faxion.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "qhs/rng.hpp"
#include "qhs/units.hpp"

namespace qhs {

namespace {

// Regularized lower incomplete gamma for k = 3/2:
// P(3/2, y) = erf(sqrt(y)) - 2 sqrt(y/pi) exp(-y)
double gamma32_cdf(double y) {
  if (y <= 0.0) return 0.0;
  const double r = std::sqrt(y);
  return std::erf(r) - 2.0 * r * std::exp(-y) / std::sqrt(M_PI);
}

double gamma32_pdf(double y) {  // d/dy P(3/2, y)
  if (y <= 0.0) return 0.0;
  return 2.0 * std::sqrt(y) * std::exp(-y) / std::sqrt(M_PI);
}

double gamma32_inv_cdf(double p) {
  if (p <= 0.0) return 0.0;
  if (p >= 1.0) throw std::invalid_argument("inv_cdf: p must be < 1");
  double lo = 0.0, hi = 1.0;
  while (gamma32_cdf(hi) < p) hi *= 2.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (gamma32_cdf(mid) < p)
      lo = mid;
    else
      hi = mid;
    if (hi - lo < 1e-14 * (1.0 + hi)) break;
  }
  double y = 0.5 * (lo + hi);
  for (int it = 0; it < 4; ++it) {  // Newton polish
    const double f = gamma32_cdf(y) - p;
    const double d = gamma32_pdf(y);
    if (d <= 0.0) break;
    const double step = f / d;
    y -= step;
    if (y <= lo || y >= hi) { y = std::clamp(y, lo, hi); break; }
  }
  return y;
}

// roots of sqrt(u) e^-u = sqrt(1/2) e^-3/2, bracketing the mode at u = 1/2
double solve_width_root(double lo, double hi) {
  const double target = std::sqrt(0.5) * std::exp(-1.5);
  auto f = [&](double u) { return std::sqrt(u) * std::exp(-u) - target; };
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if ((f(lo) < 0.0) == (f(mid) < 0.0))
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

double width_constant() {
  static const double w = solve_width_root(0.5, 20.0) - solve_width_root(1e-12, 0.5);
  return w;
}

uint64_t fnv_mix(uint64_t h, double v) {
  uint64_t bits;
  static_assert(sizeof(bits) == sizeof(v));
  std::memcpy(&bits, &v, sizeof(bits));
  for (int i = 0; i < 8; ++i) {
    h ^= (bits >> (8 * i)) & 0xffULL;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace

void AxionLineshape::validate() const {
  if (rest_frequency <= 0.0) throw std::invalid_argument("lineshape: rest frequency must be > 0");
  if (velocity_parameter <= 0.0)
    throw std::invalid_argument("lineshape: velocity parameter must be > 0");
}

double AxionLineshape::pdf(double frequency) const {
  const double x = frequency - rest_frequency;
  if (x <= 0.0) return 0.0;
  const double th = theta();
  return gamma32_pdf(x / th) / th;
}

double AxionLineshape::cdf(double frequency) const {
  const double x = frequency - rest_frequency;
  if (x <= 0.0) return 0.0;
  return gamma32_cdf(x / theta());
}

double AxionLineshape::inv_cdf(double p) const {
  return rest_frequency + theta() * gamma32_inv_cdf(p);
}

double AxionLineshape::width_1e() const { return theta() * width_constant(); }

void FaxionConfig::validate() const {
  lineshape.validate();
  if (update_rate <= 0.0) throw std::invalid_argument("faxion: update rate must be > 0");
  if (modulation_depth <= 0.0) throw std::invalid_argument("faxion: modulation depth must be > 0");
  if (carrier_power < 0.0) throw std::invalid_argument("faxion: carrier power must be >= 0");
}

std::vector<double> sample_frequencies(const AxionLineshape& shape, size_t count, uint64_t seed) {
  shape.validate();
  Rng rng(seed);
  std::vector<double> out(count);
  for (size_t i = 0; i < count; ++i) out[i] = shape.inv_cdf(rng.uniform());
  return out;
}

FrequencyTrack synthesize_track(const FaxionConfig& config, double duration, double carrier,
                                uint64_t seed) {
  config.validate();
  if (duration * config.update_rate < 1.0)
    throw std::invalid_argument("synthesize_track: duration must cover at least one update");
  const size_t n = static_cast<size_t>(std::ceil(duration * config.update_rate));
  const double scale = config.offset_scale();
  const double nu_a = config.lineshape.rest_frequency;
  FrequencyTrack track;
  track.sample_times.resize(n);
  track.instantaneous_frequencies.resize(n);
  Rng rng(seed);
  for (size_t i = 0; i < n; ++i) {
    track.sample_times[i] = static_cast<double>(i) / config.update_rate;
    const double nu = config.lineshape.inv_cdf(rng.uniform());
    track.instantaneous_frequencies[i] = carrier + (nu - nu_a) * scale;
  }
  return track;
}

double SpectralEnvelope::density_at(double offset_hz) const {
  const double pos = (offset_hz - offset_origin) / resolution;
  const long idx = std::lround(pos);
  if (idx < 0 || idx >= static_cast<long>(density.size())) return 0.0;
  return density[static_cast<size_t>(idx)];
}

double SpectralEnvelope::peak_density() const {
  double m = 0.0;
  for (double d : density) m = std::max(m, d);
  return m;
}

double SpectralEnvelope::peak_offset() const {
  size_t best = 0;
  for (size_t i = 1; i < density.size(); ++i)
    if (density[i] > density[best]) best = i;
  return offset(best);
}

void SpectralEnvelope::support(double frac, double* lo, double* hi) const {
  const double cut = frac * peak_density();
  size_t first = density.size(), last = 0;
  for (size_t i = 0; i < density.size(); ++i) {
    if (density[i] > cut) {
      first = std::min(first, i);
      last = i;
    }
  }
  if (first > last) { *lo = 0.0; *hi = 0.0; return; }
  *lo = offset(first);
  *hi = offset(last);
}

SpectralEnvelope spectral_envelope(const FaxionConfig& config, double resolution,
                                   double sim_seconds, uint64_t seed) {
  config.validate();
  if (resolution > config.modulation_depth / 3.0)
    throw std::invalid_argument("spectral_envelope: resolution must be <= depth/3");

  // One long FM simulation at complex baseband, segmented at the requested
  // resolution, periodograms averaged.
  const int oversample = 4096;
  const double fs = resolution * oversample;  // covers offsets to +-fs/2
  const int nseg = oversample;
  const int segments = std::max(1, static_cast<int>(sim_seconds * resolution));

  FrequencyTrack track = synthesize_track(config, sim_seconds + 1.0 / config.update_rate, 0.0, seed);

  std::vector<std::complex<double>> buf(nseg);
  std::vector<double> acc(nseg, 0.0);
  fftw_plan plan = fftw_plan_dft_1d(nseg, reinterpret_cast<fftw_complex*>(buf.data()),
                                    reinterpret_cast<fftw_complex*>(buf.data()), FFTW_FORWARD,
                                    FFTW_ESTIMATE);
  double phase = 0.0;
  long sample = 0;
  for (int s = 0; s < segments; ++s) {
    for (int j = 0; j < nseg; ++j, ++sample) {
      const double t = static_cast<double>(sample) / fs;
      size_t k = static_cast<size_t>(t * config.update_rate);
      k = std::min(k, track.instantaneous_frequencies.size() - 1);
      phase += kTwoPi * track.instantaneous_frequencies[k] / fs;
      buf[j] = std::polar(1.0, phase);
    }
    fftw_execute(plan);
    for (int j = 0; j < nseg; ++j) acc[j] += std::norm(buf[j]);
  }
  fftw_destroy_plan(plan);

  // reorder to ascending offset, normalize to unit integral
  std::vector<double> dens(nseg);
  for (int j = 0; j < nseg; ++j) {
    const int k = (j + nseg / 2) % nseg;  // j=0 -> most negative offset
    dens[j] = acc[k];
  }
  double total = 0.0;
  for (double d : dens) total += d;
  for (double& d : dens) d /= total * resolution;

  // trim to the support plus a small margin
  const double cut = 1e-7 * *std::max_element(dens.begin(), dens.end());
  int first = 0, last = nseg - 1;
  while (first < nseg && dens[first] <= cut) ++first;
  while (last > first && dens[last] <= cut) --last;
  const int margin = 16;
  first = std::max(0, first - margin);
  last = std::min(nseg - 1, last + margin);

  SpectralEnvelope env;
  env.resolution = resolution;
  env.offset_origin = (first - nseg / 2) * resolution;
  env.density.assign(dens.begin() + first, dens.begin() + last + 1);
  // renormalize after the trim
  double kept = 0.0;
  for (double d : env.density) kept += d;
  for (double& d : env.density) d /= kept * resolution;
  return env;
}

uint64_t faxion_config_hash(const FaxionConfig& config, double resolution) {
  uint64_t h = 1469598103934665603ULL;
  h = fnv_mix(h, config.update_rate);
  h = fnv_mix(h, config.modulation_depth);
  h = fnv_mix(h, config.lineshape.rest_frequency);
  h = fnv_mix(h, config.lineshape.velocity_parameter);
  h = fnv_mix(h, resolution);
  return h;
}

SpectralEnvelope cached_envelope(const FaxionConfig& config, double resolution,
                                 const std::string& cache_dir, bool force_regen, uint64_t seed) {
  namespace fs = std::filesystem;
  const uint64_t hash = faxion_config_hash(config, resolution);
  std::ostringstream name;
  name << "envelope_" << std::hex << hash;
  const fs::path csv = fs::path(cache_dir) / (name.str() + ".csv");
  const fs::path meta = fs::path(cache_dir) / (name.str() + ".json");

  if (!force_regen && fs::exists(csv) && fs::exists(meta)) {
    std::ifstream in(csv);
    std::string line;
    std::getline(in, line);  // header
    SpectralEnvelope env;
    env.resolution = resolution;
    bool first = true;
    while (std::getline(in, line)) {
      const auto comma = line.find(',');
      if (comma == std::string::npos) continue;
      const double off = std::stod(line.substr(0, comma));
      const double den = std::stod(line.substr(comma + 1));
      if (first) {
        env.offset_origin = off;
        first = false;
      }
      env.density.push_back(den);
    }
    if (!env.density.empty()) return env;
  }

  SpectralEnvelope env = spectral_envelope(config, resolution, 20.0, seed);
  fs::create_directories(cache_dir);
  {
    std::ofstream out(csv);
    out << "offset_Hz,normalized_psd\n";
    out.precision(12);
    for (size_t i = 0; i < env.density.size(); ++i)
      out << env.offset(i) << "," << env.density[i] << "\n";
  }
  {
    std::ofstream out(meta);
    out << "{\n  \"config_hash\": \"" << std::hex << hash << std::dec << "\",\n"
        << "  \"resolution_hz\": " << resolution << ",\n"
        << "  \"update_rate_hz\": " << config.update_rate << ",\n"
        << "  \"modulation_depth_hz\": " << config.modulation_depth << ",\n"
        << "  \"rest_frequency_hz\": " << config.lineshape.rest_frequency << ",\n"
        << "  \"velocity_parameter\": " << config.lineshape.velocity_parameter << "\n}\n";
  }
  return env;
}

}  // namespace qhs
