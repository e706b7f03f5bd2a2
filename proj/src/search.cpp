#include "qhs/search.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "qhs/rng.hpp"

namespace qhs {

namespace {

struct OutputWindow {
  int first_bin;
  int n_bins;
};

OutputWindow output_window(const SearchModel& model, const TuningPlan& plan,
                           const PipelineOptions& opt) {
  const double res = model.grid.resolution;
  double pad = opt.combine_pad;
  if (pad <= 0.0) {
    double lo = 0.0, hi = 0.0;
    model.envelope.support(1e-6, &lo, &hi);
    pad = std::max(std::abs(lo), std::abs(hi)) + 20.0 * res;
  }
  const double win_lo = plan.init_center - 0.5 * plan.init_window - pad;
  const double win_hi = plan.init_center + 0.5 * plan.init_window + pad;
  OutputWindow w;
  w.first_bin = static_cast<int>(std::lround(win_lo / res));
  w.n_bins = static_cast<int>(std::lround((win_hi - win_lo) / res)) + 1;
  return w;
}

// folded-bin interval covering signed bins [lo, hi)
void folded_cover(int lo, int hi, int n_half, int* fmin, int* fmax) {
  const int a = std::abs(lo), b = std::abs(hi - 1);
  *fmin = (lo <= 0 && hi > 0) ? 0 : std::min(a, b);
  *fmax = std::min(std::max(a, b), n_half - 1);
}

TrialResult run_trial_fast(const SearchModel& model, const TuningPlan& plan,
                           const AcquisitionParams& acq, const PipelineOptions& opt,
                           uint64_t master_seed, int trial_index) {
  const int steps = plan.step_count();
  const int n_half = model.grid.n_half;
  const double truth = draw_truth_offset(plan, model.grid, master_seed, trial_index);

  // pass 1: accumulate the baseline without storing spectra
  std::vector<double> baseline(n_half, 0.0);
  std::vector<double> scratch(n_half);
  for (int s = 0; s < steps; ++s) {
    const std::vector<double> means = expected_psd(model, truth + s * plan.step_size);
    const uint64_t seed = mix_seed(master_seed, trial_index, kSaltStep, static_cast<uint64_t>(s));
    simulate_bins_fast(means, acq.sub_traces, seed, 0, n_half, scratch.data());
    for (int i = 0; i < n_half; ++i) baseline[i] += scratch[i];
  }
  for (double& b : baseline) b /= steps;
  const std::vector<double> smooth = sg_filter(baseline, opt.sg_window, opt.sg_order);

  // pass 2: regenerate only the slice each step contributes to the window
  const OutputWindow win = output_window(model, plan, opt);
  CombineAccumulator acc(model.grid.resolution, win.first_bin, win.n_bins, plan,
                         model.alpha_weight);
  const double sigma = 1.0 / std::sqrt(static_cast<double>(acq.sub_traces) *
                                       acq.sub_trace_duration * acq.resolution());
  ProcessedSpectrum slice;
  slice.grid = model.grid;
  slice.sigma = sigma;
  slice.excess.assign(n_half, 0.0);
  for (int s = 0; s < steps; ++s) {
    int lo = 0, hi = 0;
    acc.source_range(s, &lo, &hi);
    int fmin = 0, fmax = 0;
    folded_cover(lo, hi, n_half, &fmin, &fmax);
    if (fmin > fmax) continue;
    const std::vector<double> means = expected_psd(model, truth + s * plan.step_size);
    const uint64_t seed = mix_seed(master_seed, trial_index, kSaltStep, static_cast<uint64_t>(s));
    simulate_bins_fast(means, acq.sub_traces, seed, fmin, fmax + 1, scratch.data());
    for (int i = fmin; i <= fmax; ++i)
      slice.excess[i] = scratch[i - fmin] / smooth[i] - 1.0;
    slice.step_index = s;
    acc.add(slice, s);
  }

  TrialResult r;
  r.truth_offset = truth;
  r.combined = acc.finalize(opt.min_weight_frac);
  r.grand = grand_spectrum(r.combined, model.envelope);
  r.outcome = find_candidate(r.grand);
  r.outcome.trial_index = trial_index;
  return r;
}

TrialResult run_trial_timedomain(const SearchModel& model, const FaxionConfig& faxion,
                                 const TuningPlan& plan, const AcquisitionParams& acq,
                                 const PipelineOptions& opt, uint64_t master_seed,
                                 int trial_index) {
  SearchData data =
      run_search(model, faxion, plan, acq, master_seed, trial_index, AcqMode::kTimeDomain);
  const std::vector<double> base = average_baseline(data.spectra);
  const std::vector<double> smooth = sg_filter(base, opt.sg_window, opt.sg_order);
  std::vector<ProcessedSpectrum> processed;
  processed.reserve(data.spectra.size());
  for (const auto& s : data.spectra) processed.push_back(normalize(s, smooth, acq));
  const OutputWindow win = output_window(model, plan, opt);
  TrialResult r;
  r.truth_offset = data.truth_offset;
  r.combined =
      shift_and_combine(processed, plan, model.alpha_weight, win.first_bin, win.n_bins);
  r.grand = grand_spectrum(r.combined, model.envelope);
  r.outcome = find_candidate(r.grand);
  r.outcome.trial_index = trial_index;
  return r;
}

}  // namespace

TrialResult run_trial(const SearchModel& model, const FaxionConfig& faxion,
                      const TuningPlan& plan, const AcquisitionParams& acq,
                      const PipelineOptions& opt, uint64_t master_seed, int trial_index,
                      AcqMode mode) {
  plan.validate(acq.resolution());
  TrialResult r = mode == AcqMode::kFast
                      ? run_trial_fast(model, plan, acq, opt, master_seed, trial_index)
                      : run_trial_timedomain(model, faxion, plan, acq, opt, master_seed,
                                             trial_index);
  score_outcome(&r.outcome, r.truth_offset, faxion.modulation_depth);
  return r;
}

SearchSummary run_trials(const SearchModel& model, const FaxionConfig& faxion,
                         const TuningPlan& plan, const AcquisitionParams& acq,
                         const PipelineOptions& opt, uint64_t master_seed, int n_trials,
                         AcqMode mode, int threads) {
  if (n_trials < 1) throw std::invalid_argument("run_trials: need at least one trial");
  threads = std::max(1, threads);
  std::vector<TrialResult> results(n_trials);
  if (threads == 1) {
    for (int t = 0; t < n_trials; ++t)
      results[t] = run_trial(model, faxion, plan, acq, opt, master_seed, t, mode);
  } else {
    std::vector<std::thread> pool;
    std::atomic<int> next{0};
    for (int w = 0; w < threads; ++w)
      pool.emplace_back([&]() {
        for (;;) {
          const int t = next.fetch_add(1);
          if (t >= n_trials) return;
          results[t] = run_trial(model, faxion, plan, acq, opt, master_seed, t, mode);
        }
      });
    for (auto& th : pool) th.join();
  }
  SearchSummary s;
  s.outcomes.reserve(n_trials);
  for (const auto& r : results) s.outcomes.push_back(r.outcome);
  if (n_trials >= 2) {
    s.histogram = fit_histogram(s.outcomes);
  } else {
    s.histogram.values.push_back(s.outcomes.front().best_excess);
    s.histogram.mu = s.outcomes.front().best_excess;
  }
  s.first_trial = std::move(results.front());
  return s;
}

}  // namespace qhs
