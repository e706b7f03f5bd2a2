#include "qhs/chain.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "qhs/units.hpp"

namespace qhs {

void ChainParams::validate() const {
  if (efficiency_eta <= 0.0 || efficiency_eta > 1.0)
    throw std::invalid_argument("chain: efficiency must be in (0,1]");
  if (temperature <= 0.0) throw std::invalid_argument("chain: temperature must be > 0");
  if (n_sys_quanta < 0.0) throw std::invalid_argument("chain: n_sys must be >= 0");
  if (jpa.peak_power_gain < 1.0) throw std::invalid_argument("chain: JPA gain must be >= 1");
  if (signal_frequency <= 0.0) throw std::invalid_argument("chain: signal frequency must be > 0");
}

double bose_occupancy(double frequency, double temperature) {
  if (frequency <= 0.0 || temperature <= 0.0)
    throw std::invalid_argument("bose_occupancy: frequency and temperature must be > 0");
  return 1.0 / std::expm1(kHbar * frequency / (kBoltzmann * temperature));
}

double total_noise_psd(const PortPsd& port, const ChainParams& chain, double detuning) {
  chain.validate();
  const double g_jpa = chain.jpa.at(detuning);
  if (g_jpa <= 0.0) throw std::runtime_error("total_noise_psd: JPA gain must be positive");
  const double n20 = bose_occupancy(chain.signal_frequency, chain.temperature);
  const double eta = chain.efficiency_eta;
  // Quanta budget: (1-eta)/eta * (N + 1/2) from the beam splitter and
  // N_sys/(eta G) after the JPA; converted to vacuum units in one place.
  const double splitter = (1.0 - eta) / eta * vacuum_psd_from_quanta(n20);
  const double post_jpa = vacuum_psd_from_quanta(chain.n_sys_quanta) - 1.0;  // 2*N_sys
  return port.total_noise() + splitter + post_jpa / (eta * g_jpa);
}

double visibility(double signal_psd, double noise_psd) {
  if (noise_psd <= 0.0) throw std::invalid_argument("visibility: noise PSD must be > 0");
  return signal_psd / noise_psd;
}

VisibilityCurve visibility_curve(const SystemParams& system, const ChainParams& chain,
                                 std::span<const double> grid, double probe_power) {
  VisibilityCurve c;
  c.detuning.assign(grid.begin(), grid.end());
  c.alpha.resize(grid.size());
  c.cavity_noise.resize(grid.size());
  c.measurement_noise.resize(grid.size());
  c.total_noise.resize(grid.size());
  for (size_t i = 0; i < grid.size(); ++i) {
    const PortPsd p = port_psd(system, grid[i]);
    const double noise = total_noise_psd(p, chain, grid[i]);
    c.alpha[i] = visibility(probe_power * p.signal_gain, noise);
    c.cavity_noise[i] = p.cavity_noise;
    c.measurement_noise[i] = p.measurement_noise;
    c.total_noise[i] = noise;
  }
  return c;
}

namespace {

double bandwidth_from_components(std::span<const double> detuning,
                                 std::span<const double> cavity,
                                 std::span<const double> measurement) {
  const size_t n = detuning.size();
  if (n == 0) return 0.0;
  size_t center = 0;
  for (size_t i = 1; i < n; ++i)
    if (std::abs(detuning[i]) < std::abs(detuning[center])) center = i;
  if (cavity[center] < measurement[center]) return 0.0;
  size_t lo = center, hi = center;
  while (lo > 0 && cavity[lo - 1] >= measurement[lo - 1]) --lo;
  while (hi + 1 < n && cavity[hi + 1] >= measurement[hi + 1]) ++hi;
  return detuning[hi] - detuning[lo];
}

}  // namespace

double visibility_bandwidth(std::span<const PortPsd> curve) {
  std::vector<double> d(curve.size()), cav(curve.size()), mea(curve.size());
  for (size_t i = 0; i < curve.size(); ++i) {
    d[i] = curve[i].detuning;
    cav[i] = curve[i].cavity_noise;
    mea[i] = curve[i].measurement_noise;
  }
  return bandwidth_from_components(d, cav, mea);
}

ScanRateReport scan_rate(const VisibilityCurve& curve) {
  const size_t n = curve.size();
  if (n < 3) throw std::invalid_argument("scan_rate: curve too short");
  double peak = 0.0;
  for (double a : curve.alpha) peak = std::max(peak, a);
  if (peak <= 0.0) {
    ScanRateReport z;
    z.visibility_bandwidth =
        bandwidth_from_components(curve.detuning, curve.cavity_noise, curve.measurement_noise);
    return z;
  }
  const double edge = std::max(curve.alpha.front(), curve.alpha.back());
  if (edge * edge > 1e-4 * peak * peak) {
    std::ostringstream msg;
    msg << "scan_rate: grid does not span the alpha^2 support (edge fraction "
        << (edge * edge) / (peak * peak) << " at detuning " << curve.detuning.front() << " .. "
        << curve.detuning.back() << " rad/s); widen the grid";
    throw std::runtime_error(msg.str());
  }
  double integral = 0.0;
  for (size_t i = 1; i < n; ++i) {
    const double a0 = curve.alpha[i - 1], a1 = curve.alpha[i];
    integral += 0.5 * (a0 * a0 + a1 * a1) * (curve.detuning[i] - curve.detuning[i - 1]);
  }
  ScanRateReport r;
  r.integral_alpha_sq = integral;
  r.peak_alpha = peak;
  r.visibility_bandwidth =
      bandwidth_from_components(curve.detuning, curve.cavity_noise, curve.measurement_noise);
  return r;
}

double enhancement_ratio(const ScanRateReport& numerator, const ScanRateReport& denominator) {
  if (denominator.integral_alpha_sq <= 0.0)
    throw std::invalid_argument("enhancement_ratio: denominator integral must be > 0");
  return numerator.integral_alpha_sq / denominator.integral_alpha_sq;
}

std::vector<double> linear_grid(double lo, double hi, size_t count) {
  std::vector<double> g(count);
  for (size_t i = 0; i < count; ++i)
    g[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
  return g;
}

}  // namespace qhs
