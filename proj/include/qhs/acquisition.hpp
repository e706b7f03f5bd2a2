#pragma once

#include <cstdint>
#include <vector>

#include "qhs/chain.hpp"
#include "qhs/faxion.hpp"
#include "qhs/qnet.hpp"

namespace qhs {

struct AcquisitionParams {
  int sub_traces = 32;
  double sub_trace_duration = 5e-3;  // s
  double half_span = 13.8e6;         // Hz, folded band [0, half_span]

  double resolution() const { return 1.0 / sub_trace_duration; }
  double total_trace() const { return sub_traces * sub_trace_duration; }
  void validate() const;
};

struct TuningPlan {
  double step_size = 10e3;      // Hz
  double window = 26e6;         // Hz tuned across
  double init_window = 1e6;     // Hz
  double init_center = -13e6;   // Hz, center of the initialization window
                                // relative to the cavity (outside the band)

  int step_count() const { return static_cast<int>(std::lround(window / step_size)) + 1; }
  void validate(double resolution) const;
};

// Spectra are symmetric about the local oscillator (single-quadrature
// detection folds the sidebands), so only the nonnegative half is stored.
struct FoldedGrid {
  double resolution = 0.0;  // Hz
  int n_half = 0;           // bins 0..n_half-1 at f = i*resolution

  double frequency(int i) const { return resolution * i; }
  int fold(int signed_bin) const { return signed_bin < 0 ? -signed_bin : signed_bin; }
  bool contains(int signed_bin) const { return fold(signed_bin) < n_half; }
  int bin_of(double freq_hz) const { return static_cast<int>(std::lround(freq_hz / resolution)); }
};

struct RawSpectrum {
  FoldedGrid grid;
  std::vector<double> psd;  // per folded bin, arbitrary chain units
  int step_index = 0;
  double faxion_offset = 0.0;  // Hz; truth bookkeeping, never serialized for analysis

  double at_signed(int signed_bin) const { return psd[grid.fold(signed_bin)]; }
};

// Per-configuration forward model on the folded grid: chain-referred noise
// mean and the signal path gain, plus the visibility weights the analysis
// uses. Faxion power is calibrated against the critically-coupled reference.
struct SearchModel {
  FoldedGrid grid;
  std::vector<double> noise_mean;   // eta * G_jpa * S_N_meas per bin
  std::vector<double> signal_path;  // eta * G_jpa * signal_gain per bin
  std::vector<double> alpha_weight; // visibility normalized to its peak
  SpectralEnvelope envelope;
  double faxion_power = 0.0;        // input tone power (vacuum units * Hz)

  static SearchModel build(const SystemParams& system, const SystemParams& ql_reference,
                           const ChainParams& chain, const FaxionConfig& faxion,
                           const AcquisitionParams& acq, const SpectralEnvelope& envelope);
};

// Mean PSD per folded bin with the faxion at the given offset from the
// cavity; the tone appears at both +-offset after folding.
std::vector<double> expected_psd(const SearchModel& model, double faxion_offset_hz);

// Each averaged bin is Gamma(n, mean/n): the exact distribution of an
// n-average of exponential periodogram bins. Bins are drawn from independent
// counter-based substreams so any slice can be regenerated exactly.
RawSpectrum simulate_step_fast(const std::vector<double>& means, const AcquisitionParams& params,
                               const FoldedGrid& grid, uint64_t seed);

void simulate_bins_fast(const std::vector<double>& means, int n_subtraces, uint64_t seed,
                        int first_bin, int last_bin, double* out);

// Full synthesis: filtered Gaussian quadrature noise plus the FM tone,
// windowed into sub-traces, transformed, symmetrized about the LO, averaged.
RawSpectrum simulate_step_timedomain(const SearchModel& model, const FrequencyTrack& track,
                                     double faxion_offset_hz, const AcquisitionParams& params,
                                     uint64_t seed);

struct SearchData {
  std::vector<RawSpectrum> spectra;
  double truth_offset = 0.0;  // Hz from the cavity; sealed from the analysis
};

enum class AcqMode { kFast, kTimeDomain };

// Materializing search driver (use for modest configs; the trial pipeline in
// search.hpp streams instead of storing).
SearchData run_search(const SearchModel& model, const FaxionConfig& faxion, const TuningPlan& plan,
                      const AcquisitionParams& params, uint64_t master_seed, uint64_t trial_index,
                      AcqMode mode);

double draw_truth_offset(const TuningPlan& plan, const FoldedGrid& grid, uint64_t master_seed,
                         uint64_t trial_index);

// substream salts
inline constexpr uint64_t kSaltTruth = 0x7472757468ULL;
inline constexpr uint64_t kSaltStep = 0x73746570ULL;
inline constexpr uint64_t kSaltTrack = 0x747261636bULL;

}  // namespace qhs
