#pragma once

#include <cmath>

namespace qhs {

inline constexpr double kHbar = 1.054571817e-34;      // J s
inline constexpr double kBoltzmann = 1.380649e-23;    // J/K
inline constexpr double kTwoPi = 6.28318530717958647692;

// Configuration quotes rates as ordinary frequencies in Hz; all internal
// computation is in angular units.
inline double rad_from_hz(double f) { return kTwoPi * f; }
inline double hz_from_rad(double w) { return w / kTwoPi; }

inline double db_from_power(double g) { return 10.0 * std::log10(g); }
inline double power_from_db(double db) { return std::pow(10.0, db / 10.0); }

// Quanta <-> PSD in vacuum units (vacuum half-quantum maps to 1).
// This function owns the convention; nothing else hardcodes the factor.
inline double vacuum_psd_from_quanta(double n) { return 2.0 * n + 1.0; }

}  // namespace qhs
