#pragma once

#include <Eigen/Dense>
#include <complex>

#include "qhs/system.hpp"

namespace qhs {

using Mat4 = Eigen::Matrix4d;
using Mat6c = Eigen::Matrix<std::complex<double>, 6, 6>;
using Mat6 = Eigen::Matrix<double, 6, 6>;
using Mat12 = Eigen::Matrix<double, 12, 12>;

// Quadrature ordering used throughout.
// State vector: (X_A, Y_A, X_B, Y_B).
// Port vector:  (X_a, Y_a, X_l, Y_l, X_m, Y_m)  = axion, loss, measurement.
enum PortQuad { kXa = 0, kYa = 1, kXl = 2, kYl = 3, kXm = 4, kYm = 5 };

// Langevin drift matrix of the two-mode network in the co-rotating frame,
// x_dot = M x + inputs. Couplings are g_swap +- g_tms; balanced rates leave
// the X_A row free of any readout backaction.
Mat4 build_drift(const SystemParams& params);

// Frequency-domain quadrature scattering at one detuning. The response mixes
// a(+delta) with a'(-delta), so the matrix is complex for delta != 0;
// commutator preservation reads S J S^dag = J. real_form() packs the same map
// as a real 12x12 over cosine/sine temporal quadratures, symplectic under
// plain transpose.
struct QuadratureScattering {
  double detuning = 0.0;  // rad/s
  Mat6c matrix;

  Mat12 real_form() const;
  static Mat6 canonical_form();     // J, block-diagonal 2x2 rotations by 90 deg
  static Mat12 canonical_form_12();
};

QuadratureScattering scattering_at(const SystemParams& params, double detuning);

struct PortOccupations {
  double axion = 0.0;        // quanta at each input port; vacuum = 0
  double loss = 0.0;
  double measurement = 0.0;
  double readout_loss = 0.0;
};

// Noise decomposition of the measured output quadrature (Y_B port component),
// in vacuum units. signal_gain is the axion-port -> measured-quadrature power
// gain applied to an injected tone.
struct PortPsd {
  double detuning = 0.0;
  double cavity_noise = 0.0;        // loss-port inputs
  double measurement_noise = 0.0;   // measurement-port inputs
  double signal_gain = 0.0;         // |S(Y_m <- X_a)|^2
  double axion_port_noise = 0.0;    // vacuum/thermal entering the axion port
  double readout_loss_noise = 0.0;  // only when the readout mode has internal loss

  double total_noise() const {
    return cavity_noise + measurement_noise + axion_port_noise + readout_loss_noise;
  }
};

PortPsd port_psd(const SystemParams& params, double detuning,
                 const PortOccupations& occ = {});

// Photon-flux (phase-preserving) transmission gain seen by a detuned
// single-sideband tone entering the loss port; recombines the two quadrature
// sectors. Equals 1 for the critically coupled swap-only network.
double phase_preserving_gain(const SystemParams& params, double detuning);

// |S_ml| inferred from the axion-port scattering amplitude.
double infer_s_ml(double s_ma, double kappa_l, double kappa_a);

}  // namespace qhs
