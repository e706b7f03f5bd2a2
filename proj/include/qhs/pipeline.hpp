#pragma once

#include <span>
#include <vector>

#include "qhs/acquisition.hpp"

namespace qhs {

struct ProcessedSpectrum {
  FoldedGrid grid;
  std::vector<double> excess;  // raw/baseline - 1, mean 0
  double sigma = 0.0;          // per-bin std, 1/sqrt(n tau dv)
  int step_index = 0;

  double at_signed(int signed_bin) const { return excess[grid.fold(signed_bin)]; }
};

std::vector<double> average_baseline(std::span<const RawSpectrum> spectra);

// Least-squares local polynomial smoothing with mirrored edges.
std::vector<double> sg_filter(const std::vector<double>& data, int window, int order);

ProcessedSpectrum normalize(const RawSpectrum& raw, const std::vector<double>& smoothed_baseline,
                            const AcquisitionParams& params);

struct CombinedSpectrum {
  double resolution = 0.0;  // Hz
  int first_bin = 0;        // signed RF bin index of entry 0
  std::vector<double> excess;  // ML estimate in unit-visibility units
  std::vector<double> sigma;
  std::vector<double> weight;  // accumulated weight mass per bin
  std::vector<bool> valid;     // false where weight mass is below the floor

  double offset_hz(size_t i) const {
    return resolution * (first_bin + static_cast<long>(i));
  }
};

// Streaming ML combiner. Each processed spectrum is shifted back by its
// step's tuning offset and accumulated with weights alpha^2/sigma^2; the
// estimate per output bin is sum(alpha x / sigma^2) / sum(alpha^2 / sigma^2).
class CombineAccumulator {
 public:
  CombineAccumulator(double resolution, int first_bin, int n_bins, const TuningPlan& plan,
                     std::vector<double> alpha_weight /* per folded bin, peak 1 */);

  void add(const ProcessedSpectrum& processed, int step_index);
  CombinedSpectrum finalize(double min_weight_frac = 0.1) const;

  // signed source-bin range a given step reads from
  void source_range(int step_index, int* lo, int* hi) const;

 private:
  double resolution_;
  int first_bin_;
  int n_bins_;
  int shift_bins_;
  std::vector<double> alpha_;
  std::vector<double> sum_wx_;
  std::vector<double> sum_w_;
};

CombinedSpectrum shift_and_combine(std::span<const ProcessedSpectrum> processed,
                                   const TuningPlan& plan,
                                   const std::vector<double>& alpha_weight, int first_bin,
                                   int n_bins);

struct GrandSpectrum {
  double resolution = 0.0;
  int first_bin = 0;
  std::vector<double> excess;  // sigma units
  std::vector<bool> valid;

  double offset_hz(size_t i) const {
    return resolution * (first_bin + static_cast<long>(i));
  }
};

// Matched filter against the binned lineshape template:
// g_k = sum_j L_j e_{k+j} / s^2_{k+j} / sqrt(sum_j L_j^2 / s^2_{k+j}).
GrandSpectrum grand_spectrum(const CombinedSpectrum& combined, const SpectralEnvelope& envelope);

struct SearchOutcome {
  int trial_index = 0;
  double best_bin_offset = 0.0;  // Hz
  double best_excess = 0.0;      // sigma_g units
  bool truth_hit = false;
};

SearchOutcome find_candidate(const GrandSpectrum& grand);

void score_outcome(SearchOutcome* outcome, double truth_offset_hz, double lineshape_width_hz);

struct ExcessHistogram {
  std::vector<double> values;
  double mu = 0.0;
  double sigma = 0.0;
  double mu_stderr = 0.0;
};

ExcessHistogram fit_histogram(std::span<const SearchOutcome> outcomes);

struct EnhancementEstimate {
  double value = 0.0;
  double uncertainty = 0.0;
};

// (mu_num / mu_den)^2 with propagated fit errors.
EnhancementEstimate aggregate_trials(const ExcessHistogram& numerator,
                                     const ExcessHistogram& denominator);

}  // namespace qhs
