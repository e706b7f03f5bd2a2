#pragma once

#include <cstdint>
#include <vector>

#include "qhs/pipeline.hpp"

namespace qhs {

struct PipelineOptions {
  int sg_window = 301;
  int sg_order = 4;
  double combine_pad = 0.0;       // Hz beyond the init window on each side;
                                  // 0 means derive from the envelope support
  double min_weight_frac = 0.1;
};

struct TrialResult {
  CombinedSpectrum combined;
  GrandSpectrum grand;
  SearchOutcome outcome;
  double truth_offset = 0.0;  // Hz
};

// One faxion injection + detection: acquire (streaming, two passes in fast
// mode), baseline, SG-filter, normalize, shift/combine, grand spectrum,
// candidate. Deterministic in (master_seed, trial_index).
TrialResult run_trial(const SearchModel& model, const FaxionConfig& faxion,
                      const TuningPlan& plan, const AcquisitionParams& acq,
                      const PipelineOptions& opt, uint64_t master_seed, int trial_index,
                      AcqMode mode);

struct SearchSummary {
  std::vector<SearchOutcome> outcomes;
  ExcessHistogram histogram;
  TrialResult first_trial;  // kept for plots/exports
};

SearchSummary run_trials(const SearchModel& model, const FaxionConfig& faxion,
                         const TuningPlan& plan, const AcquisitionParams& acq,
                         const PipelineOptions& opt, uint64_t master_seed, int n_trials,
                         AcqMode mode, int threads);

}  // namespace qhs
