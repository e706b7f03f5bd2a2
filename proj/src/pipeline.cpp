#include "qhs/pipeline.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace qhs {

std::vector<double> average_baseline(std::span<const RawSpectrum> spectra) {
  if (spectra.size() < 2)
    throw std::invalid_argument("average_baseline: need at least two spectra");
  const size_t n = spectra.front().psd.size();
  for (const auto& s : spectra)
    if (s.psd.size() != n || s.grid.resolution != spectra.front().grid.resolution)
      throw std::invalid_argument("average_baseline: spectra not on a common grid");
  std::vector<double> base(n, 0.0);
  for (const auto& s : spectra)
    for (size_t i = 0; i < n; ++i) base[i] += s.psd[i];
  for (double& b : base) b /= static_cast<double>(spectra.size());
  return base;
}

std::vector<double> sg_filter(const std::vector<double>& data, int window, int order) {
  if (window < 3 || window % 2 == 0)
    throw std::invalid_argument("sg_filter: window must be odd and >= 3");
  if (order < 0 || order >= window)
    throw std::invalid_argument("sg_filter: order must satisfy 0 <= order < window");
  const int half = window / 2;
  const int n = static_cast<int>(data.size());
  if (n < window) throw std::invalid_argument("sg_filter: input shorter than window");

  // smoothing kernel = first row of (A^T A)^-1 A^T for the centered
  // polynomial design matrix
  Eigen::MatrixXd a(window, order + 1);
  for (int r = 0; r < window; ++r) {
    double v = 1.0;
    for (int c = 0; c <= order; ++c) {
      a(r, c) = v;
      v *= static_cast<double>(r - half);
    }
  }
  const Eigen::MatrixXd ata = a.transpose() * a;
  Eigen::VectorXd e0 = Eigen::VectorXd::Zero(order + 1);
  e0(0) = 1.0;
  const Eigen::VectorXd kernel = a * ata.ldlt().solve(e0);

  std::vector<double> out(n);
  auto mirrored = [&](int idx) {
    if (idx < 0) idx = -idx;
    if (idx >= n) idx = 2 * n - 2 - idx;
    return data[idx];
  };
  for (int i = 0; i < n; ++i) {
    double acc = 0.0;
    for (int j = -half; j <= half; ++j) acc += kernel(j + half) * mirrored(i + j);
    out[i] = acc;
  }
  return out;
}

ProcessedSpectrum normalize(const RawSpectrum& raw, const std::vector<double>& smoothed_baseline,
                            const AcquisitionParams& params) {
  if (smoothed_baseline.size() != raw.psd.size())
    throw std::invalid_argument("normalize: baseline/spectrum size mismatch");
  ProcessedSpectrum p;
  p.grid = raw.grid;
  p.step_index = raw.step_index;
  p.sigma = 1.0 / std::sqrt(static_cast<double>(params.sub_traces) *
                            params.sub_trace_duration * params.resolution());
  p.excess.resize(raw.psd.size());
  for (size_t i = 0; i < raw.psd.size(); ++i) {
    if (!(smoothed_baseline[i] > 0.0))
      throw std::invalid_argument("normalize: baseline must be positive");
    p.excess[i] = raw.psd[i] / smoothed_baseline[i] - 1.0;
  }
  return p;
}

CombineAccumulator::CombineAccumulator(double resolution, int first_bin, int n_bins,
                                       const TuningPlan& plan, std::vector<double> alpha_weight)
    : resolution_(resolution),
      first_bin_(first_bin),
      n_bins_(n_bins),
      alpha_(std::move(alpha_weight)),
      sum_wx_(n_bins, 0.0),
      sum_w_(n_bins, 0.0) {
  const double ratio = plan.step_size / resolution;
  shift_bins_ = static_cast<int>(std::lround(ratio));
  if (std::abs(ratio - shift_bins_) > 1e-9)
    throw std::invalid_argument("shift_and_combine: step size is not an integer bin shift");
}

void CombineAccumulator::source_range(int step_index, int* lo, int* hi) const {
  *lo = first_bin_ + step_index * shift_bins_;
  *hi = *lo + n_bins_;
}

void CombineAccumulator::add(const ProcessedSpectrum& processed, int step_index) {
  const FoldedGrid& g = processed.grid;
  const double inv_var = 1.0 / (processed.sigma * processed.sigma);
  const int base = first_bin_ + step_index * shift_bins_;
  for (int k = 0; k < n_bins_; ++k) {
    const int src = base + k;
    const int folded = g.fold(src);
    if (folded >= g.n_half) continue;
    const double a = alpha_[folded];
    if (a <= 0.0) continue;
    const double w = a * a * inv_var;
    sum_w_[k] += w;
    // rescaled-excess estimator: x/alpha with weight alpha^2/sigma^2
    sum_wx_[k] += a * processed.excess[folded] * inv_var;
  }
}

CombinedSpectrum CombineAccumulator::finalize(double min_weight_frac) const {
  CombinedSpectrum c;
  c.resolution = resolution_;
  c.first_bin = first_bin_;
  c.excess.resize(n_bins_, 0.0);
  c.sigma.resize(n_bins_, 0.0);
  c.weight = sum_w_;
  c.valid.resize(n_bins_, false);
  double wmax = 0.0;
  for (double w : sum_w_) wmax = std::max(wmax, w);
  const double floor = min_weight_frac * wmax;
  for (int k = 0; k < n_bins_; ++k) {
    if (sum_w_[k] <= 0.0 || sum_w_[k] < floor) continue;
    c.excess[k] = sum_wx_[k] / sum_w_[k];
    c.sigma[k] = 1.0 / std::sqrt(sum_w_[k]);
    c.valid[k] = true;
  }
  return c;
}

CombinedSpectrum shift_and_combine(std::span<const ProcessedSpectrum> processed,
                                   const TuningPlan& plan,
                                   const std::vector<double>& alpha_weight, int first_bin,
                                   int n_bins) {
  if (processed.empty()) throw std::invalid_argument("shift_and_combine: no spectra");
  CombineAccumulator acc(processed.front().grid.resolution, first_bin, n_bins, plan, alpha_weight);
  for (const auto& p : processed) acc.add(p, p.step_index);
  return acc.finalize();
}

GrandSpectrum grand_spectrum(const CombinedSpectrum& combined, const SpectralEnvelope& envelope) {
  const int n = static_cast<int>(combined.excess.size());
  const int j0 = static_cast<int>(std::lround(envelope.offset_origin / envelope.resolution));
  const int nl = static_cast<int>(envelope.density.size());
  if (std::abs(envelope.resolution - combined.resolution) > 1e-9 * combined.resolution)
    throw std::invalid_argument("grand_spectrum: envelope and spectrum resolutions differ");
  if (nl >= n) throw std::invalid_argument("grand_spectrum: envelope wider than the spectrum");

  GrandSpectrum g;
  g.resolution = combined.resolution;
  g.first_bin = combined.first_bin;
  g.excess.assign(n, 0.0);
  g.valid.assign(n, false);
  for (int k = 0; k < n; ++k) {
    double num = 0.0, den = 0.0;
    bool ok = true;
    for (int j = 0; j < nl; ++j) {
      const int idx = k + j0 + j;
      if (idx < 0 || idx >= n || !combined.valid[idx]) { ok = false; break; }
      const double l = envelope.density[j];
      const double s2 = combined.sigma[idx] * combined.sigma[idx];
      num += l * combined.excess[idx] / s2;
      den += l * l / s2;
    }
    if (!ok || den <= 0.0) continue;
    g.excess[k] = num / std::sqrt(den);
    g.valid[k] = true;
  }
  return g;
}

SearchOutcome find_candidate(const GrandSpectrum& grand) {
  SearchOutcome out;
  double best = -std::numeric_limits<double>::infinity();
  long best_idx = -1;
  for (size_t i = 0; i < grand.excess.size(); ++i) {
    if (!grand.valid[i]) continue;
    if (grand.excess[i] > best) {
      best = grand.excess[i];
      best_idx = static_cast<long>(i);
    }
  }
  if (best_idx < 0) throw std::runtime_error("find_candidate: empty grand spectrum");
  out.best_excess = best;
  out.best_bin_offset = grand.offset_hz(static_cast<size_t>(best_idx));
  return out;
}

void score_outcome(SearchOutcome* outcome, double truth_offset_hz, double lineshape_width_hz) {
  outcome->truth_hit = std::abs(outcome->best_bin_offset - truth_offset_hz) <= lineshape_width_hz;
}

ExcessHistogram fit_histogram(std::span<const SearchOutcome> outcomes) {
  if (outcomes.size() < 2) throw std::invalid_argument("fit_histogram: need at least two trials");
  ExcessHistogram h;
  h.values.reserve(outcomes.size());
  for (const auto& o : outcomes) h.values.push_back(o.best_excess);
  const double n = static_cast<double>(h.values.size());
  double sum = 0.0;
  for (double v : h.values) sum += v;
  h.mu = sum / n;
  double ss = 0.0;
  for (double v : h.values) ss += (v - h.mu) * (v - h.mu);
  h.sigma = std::sqrt(ss / n);  // ML fit of a Gaussian
  if (!(h.sigma > 0.0)) throw std::runtime_error("fit_histogram: degenerate fit");
  h.mu_stderr = h.sigma / std::sqrt(n);
  return h;
}

EnhancementEstimate aggregate_trials(const ExcessHistogram& numerator,
                                     const ExcessHistogram& denominator) {
  if (denominator.mu == 0.0) throw std::invalid_argument("aggregate_trials: zero denominator");
  EnhancementEstimate e;
  const double r = numerator.mu / denominator.mu;
  e.value = r * r;
  const double rel = std::sqrt(std::pow(numerator.mu_stderr / numerator.mu, 2) +
                               std::pow(denominator.mu_stderr / denominator.mu, 2));
  e.uncertainty = 2.0 * e.value * rel;
  return e;
}

}  // namespace qhs
