#pragma once

#include <cmath>
#include <stdexcept>

namespace qhs {

// All rates/frequencies in rad/s.
struct ModeParams {
  double frequency = 0.0;
  double internal_loss_rate = 0.0;
  double external_coupling_rate = 0.0;
};

struct InteractionRates {
  double g_swap = 0.0;  // conversion drive, exchanges the two modes
  double g_tms = 0.0;   // two-mode-squeezing drive, entangling gain
};

// Cavity mode A: internal loss kappa_l, weak external (axion) port kappa_a.
// Readout mode B: external measurement port kappa_m, internal loss normally 0.
struct SystemParams {
  ModeParams cavity;
  ModeParams readout;
  InteractionRates rates;

  double cavity_total_rate() const {
    return cavity.internal_loss_rate + cavity.external_coupling_rate;
  }
  double readout_total_rate() const {
    return readout.internal_loss_rate + readout.external_coupling_rate;
  }

  void validate() const {
    if (cavity.frequency <= 0.0 || readout.frequency <= 0.0)
      throw std::invalid_argument("mode frequencies must be positive");
    if (cavity.internal_loss_rate < 0.0 || cavity.external_coupling_rate < 0.0 ||
        readout.internal_loss_rate < 0.0 || readout.external_coupling_rate < 0.0)
      throw std::invalid_argument("loss/coupling rates must be nonnegative");
    if (rates.g_swap < 0.0 || rates.g_tms < 0.0)
      throw std::invalid_argument("interaction rates must be nonnegative");
    if (cavity_total_rate() <= 0.0 || readout_total_rate() <= 0.0)
      throw std::invalid_argument("each mode needs a positive total damping rate");
  }
};

// Swap rate that critically couples the effective measurement port to the
// cavity loss, kappa_m_eff = kappa_l.
inline double critical_swap_rate(double kappa_m, double kappa_l) {
  return 0.5 * std::sqrt(kappa_m * kappa_l);
}

// Effective measurement port coupling rate of the swap-only configuration.
inline double effective_coupling(double g_swap, double kappa_m) {
  if (kappa_m <= 0.0) throw std::invalid_argument("effective_coupling: kappa_m must be > 0");
  return 4.0 * g_swap * g_swap / kappa_m;
}

}  // namespace qhs
