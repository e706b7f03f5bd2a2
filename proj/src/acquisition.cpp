#include "qhs/acquisition.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "qhs/rng.hpp"
#include "qhs/units.hpp"

namespace qhs {

void AcquisitionParams::validate() const {
  if (sub_traces < 1) throw std::invalid_argument("acquisition: need at least one sub-trace");
  if (sub_trace_duration <= 0.0)
    throw std::invalid_argument("acquisition: sub-trace duration must be > 0");
  if (half_span <= 0.0) throw std::invalid_argument("acquisition: span must be > 0");
}

void TuningPlan::validate(double resolutn) const {
  if (step_size <= 0.0 || window <= 0.0 || init_window <= 0.0)
    throw std::invalid_argument("plan: step, window and init window must be > 0");
  const double ratio = step_size / resolutn;
  if (std::abs(ratio - std::lround(ratio)) > 1e-9)
    throw std::invalid_argument("plan: step size must be an integer number of bins");
}

SearchModel SearchModel::build(const SystemParams& system, const SystemParams& ql_reference,
                               const ChainParams& chain, const FaxionConfig& faxion,
                               const AcquisitionParams& acq, const SpectralEnvelope& envelope) {
  acq.validate();
  chain.validate();
  faxion.validate();
  SearchModel m;
  m.grid.resolution = acq.resolution();
  m.grid.n_half = static_cast<int>(std::lround(acq.half_span / m.grid.resolution)) + 1;
  m.envelope = envelope;

  const double eta = chain.efficiency_eta;
  m.noise_mean.resize(m.grid.n_half);
  m.signal_path.resize(m.grid.n_half);
  m.alpha_weight.resize(m.grid.n_half);
  double alpha_peak = 0.0;
  for (int i = 0; i < m.grid.n_half; ++i) {
    const double delta = rad_from_hz(m.grid.frequency(i));
    const PortPsd p = port_psd(system, delta);
    const double noise = total_noise_psd(p, chain, delta);
    const double prof = eta * chain.jpa.at(delta);
    m.noise_mean[i] = prof * noise;
    m.signal_path[i] = prof * p.signal_gain;
    m.alpha_weight[i] = p.signal_gain / noise;
    alpha_peak = std::max(alpha_peak, m.alpha_weight[i]);
  }
  for (double& a : m.alpha_weight) a /= alpha_peak;

  // Calibrate the injected power so that the tone's peak PSD at the
  // measurement port equals faxion.carrier_power (vacuum units) when the
  // reference system sits on resonance.
  const PortPsd ref = port_psd(ql_reference, 0.0);
  const double peak_env = envelope.peak_density();
  if (ref.signal_gain <= 0.0 || peak_env <= 0.0)
    throw std::runtime_error("SearchModel: cannot calibrate faxion power");
  m.faxion_power = faxion.carrier_power / (peak_env * ref.signal_gain);
  return m;
}

std::vector<double> expected_psd(const SearchModel& model, double faxion_offset_hz) {
  std::vector<double> means = model.noise_mean;
  if (model.faxion_power <= 0.0) return means;
  const FoldedGrid& g = model.grid;
  double lo = 0.0, hi = 0.0;
  model.envelope.support(1e-9, &lo, &hi);
  // tone at +offset and its fold image at -offset
  for (int image = 0; image < 2; ++image) {
    const double center = image == 0 ? faxion_offset_hz : -faxion_offset_hz;
    const int b0 = std::max(0, g.bin_of(center + lo));
    const int b1 = std::min(g.n_half - 1, g.bin_of(center + hi));
    for (int b = b0; b <= b1; ++b) {
      const double d = model.envelope.density_at(g.frequency(b) - center);
      if (d > 0.0) means[b] += model.faxion_power * d * model.signal_path[b];
    }
    if (faxion_offset_hz == 0.0) break;
  }
  return means;
}

void simulate_bins_fast(const std::vector<double>& means, int n_subtraces, uint64_t seed,
                        int first_bin, int last_bin, double* out) {
  const double n = static_cast<double>(n_subtraces);
  for (int i = first_bin; i < last_bin; ++i) {
    Rng rng(mix_seed(seed, static_cast<uint64_t>(i)));
    out[i - first_bin] = means[i] * rng.gamma(n) / n;
  }
}

RawSpectrum simulate_step_fast(const std::vector<double>& means, const AcquisitionParams& params,
                               const FoldedGrid& grid, uint64_t seed) {
  params.validate();
  if (static_cast<int>(means.size()) != grid.n_half)
    throw std::invalid_argument("simulate_step_fast: means/grid size mismatch");
  for (double m : means)
    if (!(m > 0.0)) throw std::invalid_argument("simulate_step_fast: means must be positive");
  RawSpectrum s;
  s.grid = grid;
  s.psd.resize(grid.n_half);
  simulate_bins_fast(means, params.sub_traces, seed, 0, grid.n_half, s.psd.data());
  return s;
}

RawSpectrum simulate_step_timedomain(const SearchModel& model, const FrequencyTrack& track,
                                     double faxion_offset_hz, const AcquisitionParams& params,
                                     uint64_t seed) {
  params.validate();
  const FoldedGrid& grid = model.grid;
  const int nseg = 2 * (grid.n_half - 1);
  const long ntot = static_cast<long>(nseg) * params.sub_traces;
  const double fs = 2.0 * params.half_span;

  // Hermitian frequency-domain synthesis of the noise at full-trace
  // resolution; target one-sided PSD interpolated from the model grid.
  const double df = fs / static_cast<double>(ntot);
  auto mean_at = [&](double f) {
    const double pos = f / grid.resolution;
    const int i0 = std::min(static_cast<int>(pos), grid.n_half - 2);
    const double w = pos - i0;
    return (1.0 - w) * model.noise_mean[i0] + w * model.noise_mean[i0 + 1];
  };

  std::vector<double> spec(2 * (ntot / 2 + 1));
  Rng nrng(mix_seed(seed, 0x6e6f697365ULL));
  for (long k = 0; k <= ntot / 2; ++k) {
    const double m = mean_at(df * static_cast<double>(k));
    const double sigma = std::sqrt(fs * m / (4.0 * static_cast<double>(ntot)));
    if (k == 0 || k == ntot / 2) {
      spec[2 * k] = std::sqrt(2.0) * sigma * nrng.normal();
      spec[2 * k + 1] = 0.0;
    } else {
      spec[2 * k] = sigma * nrng.normal();
      spec[2 * k + 1] = sigma * nrng.normal();
    }
  }
  std::vector<double> x(ntot);
  {
    fftw_plan plan = fftw_plan_dft_c2r_1d(static_cast<int>(ntot),
                                          reinterpret_cast<fftw_complex*>(spec.data()), x.data(),
                                          FFTW_ESTIMATE);
    fftw_execute(plan);
    fftw_destroy_plan(plan);
  }

  // FM tone through the signal path, amplitude from the path gain at the
  // instantaneous detuning.
  if (model.faxion_power > 0.0) {
    Rng trng(mix_seed(seed, 0x70686173ULL));
    double phase = trng.uniform() * kTwoPi;
    const double upd = track.sample_times.size() > 1
                           ? track.sample_times[1] - track.sample_times[0]
                           : params.total_trace();
    for (long j = 0; j < ntot; ++j) {
      const double t = static_cast<double>(j) / fs;
      size_t k = static_cast<size_t>(t / upd);
      k = std::min(k, track.instantaneous_frequencies.size() - 1);
      const double f = track.instantaneous_frequencies[k];
      const int bin = std::min(grid.n_half - 1, grid.fold(grid.bin_of(f)));
      const double a = std::sqrt(2.0 * model.faxion_power * model.signal_path[bin]);
      phase += kTwoPi * f / fs;
      x[j] += a * std::cos(phase);
    }
  }

  // Sub-trace periodograms, averaged. P_k = 2 |X_k|^2 / (nseg * fs) so that a
  // white series of one-sided PSD S gives bins with mean S.
  RawSpectrum out;
  out.grid = grid;
  out.step_index = 0;
  out.faxion_offset = faxion_offset_hz;
  out.psd.assign(grid.n_half, 0.0);
  std::vector<double> seg(nseg);
  std::vector<double> segspec(2 * (nseg / 2 + 1));
  fftw_plan plan = fftw_plan_dft_r2c_1d(nseg, seg.data(),
                                        reinterpret_cast<fftw_complex*>(segspec.data()),
                                        FFTW_ESTIMATE);
  for (int s = 0; s < params.sub_traces; ++s) {
    std::copy(x.begin() + static_cast<long>(s) * nseg, x.begin() + static_cast<long>(s + 1) * nseg,
              seg.begin());
    fftw_execute(plan);
    for (int k = 0; k < grid.n_half; ++k) {
      const double re = segspec[2 * k], im = segspec[2 * k + 1];
      out.psd[k] += 2.0 * (re * re + im * im) / (static_cast<double>(nseg) * fs);
    }
  }
  fftw_destroy_plan(plan);
  for (double& v : out.psd) v /= params.sub_traces;
  return out;
}

double draw_truth_offset(const TuningPlan& plan, const FoldedGrid& grid, uint64_t master_seed,
                         uint64_t trial_index) {
  Rng rng(mix_seed(master_seed, trial_index, kSaltTruth));
  const double lo = plan.init_center - 0.5 * plan.init_window;
  const double raw = lo + rng.uniform() * plan.init_window;
  return grid.resolution * std::lround(raw / grid.resolution);
}

SearchData run_search(const SearchModel& model, const FaxionConfig& faxion, const TuningPlan& plan,
                      const AcquisitionParams& params, uint64_t master_seed, uint64_t trial_index,
                      AcqMode mode) {
  plan.validate(params.resolution());
  SearchData data;
  data.truth_offset = draw_truth_offset(plan, model.grid, master_seed, trial_index);
  const int steps = plan.step_count();
  data.spectra.reserve(steps);
  for (int s = 0; s < steps; ++s) {
    const double offset = data.truth_offset + s * plan.step_size;
    const uint64_t seed = mix_seed(master_seed, trial_index, kSaltStep, static_cast<uint64_t>(s));
    RawSpectrum spec;
    if (mode == AcqMode::kFast) {
      spec = simulate_step_fast(expected_psd(model, offset), params, model.grid, seed);
    } else {
      const FrequencyTrack track = synthesize_track(
          faxion, params.total_trace(), offset,
          mix_seed(master_seed, trial_index, kSaltTrack, static_cast<uint64_t>(s)));
      spec = simulate_step_timedomain(model, track, offset, params, seed);
    }
    spec.step_index = s;
    spec.faxion_offset = offset;
    data.spectra.push_back(std::move(spec));
  }
  return data;
}

}  // namespace qhs
