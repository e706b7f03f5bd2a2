#pragma once

#include <span>
#include <vector>

#include "qhs/qnet.hpp"

namespace qhs {

// Lorentzian phase-sensitive power gain centered on resonance.
struct JpaGainProfile {
  double peak_power_gain = 1000.0;
  double bandwidth_3db = 0.0;  // rad/s; 0 means flat

  double at(double detuning) const {
    if (bandwidth_3db <= 0.0) return peak_power_gain;
    const double x = 2.0 * detuning / bandwidth_3db;
    return peak_power_gain / (1.0 + x * x);
  }
};

struct ChainParams {
  double efficiency_eta = 1.0;   // beam-splitter energy transmission
  double temperature = 0.02;     // K, fridge base
  double n_sys_quanta = 0.0;     // added after the JPA, referred per Eq. of the chain
  JpaGainProfile jpa;
  double signal_frequency = 0.0; // rad/s, for the Bose occupancy

  void validate() const;
};

double bose_occupancy(double frequency, double temperature);

// Total noise PSD (vacuum units) at the end of the chain, referred to the
// device output: device noise + beam-splitter thermal/vacuum + post-JPA
// system noise. The quanta terms are formed in quanta and converted once.
double total_noise_psd(const PortPsd& port, const ChainParams& chain, double detuning);

double visibility(double signal_psd, double noise_psd);

struct VisibilityCurve {
  std::vector<double> detuning;           // rad/s, strictly increasing
  std::vector<double> alpha;
  std::vector<double> cavity_noise;       // device-output components, for the
  std::vector<double> measurement_noise;  // bandwidth definition and exports
  std::vector<double> total_noise;        // chain-referred total

  size_t size() const { return detuning.size(); }
};

VisibilityCurve visibility_curve(const SystemParams& system, const ChainParams& chain,
                                 std::span<const double> grid, double probe_power = 1.0);

// Contiguous interval around zero detuning where cavity noise dominates
// measurement noise; 0 when it is nowhere dominant.
double visibility_bandwidth(std::span<const PortPsd> curve);

struct ScanRateReport {
  double integral_alpha_sq = 0.0;  // rad/s
  double peak_alpha = 0.0;
  double visibility_bandwidth = 0.0;  // rad/s
};

// Trapezoidal integral of alpha^2; requires the grid to span the support
// (endpoint alpha^2 below 1e-4 of the peak).
ScanRateReport scan_rate(const VisibilityCurve& curve);

double enhancement_ratio(const ScanRateReport& numerator, const ScanRateReport& denominator);

std::vector<double> linear_grid(double lo, double hi, size_t count);

}  // namespace qhs
