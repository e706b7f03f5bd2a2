#include "qhs/qnet.hpp"

#include <cmath>
#include <stdexcept>

#include "qhs/units.hpp"

namespace qhs {

namespace {

using Mat4c = Eigen::Matrix4cd;
using Mat4x8 = Eigen::Matrix<double, 4, 8>;
using Mat8c = Eigen::Matrix<std::complex<double>, 8, 8>;

// Input coupling over the full port set (X_a,Y_a,X_l,Y_l,X_m,Y_m,X_i,Y_i);
// the last pair is the readout internal-loss channel, zero by default.
Mat4x8 input_coupling(const SystemParams& p) {
  Mat4x8 n = Mat4x8::Zero();
  const double ra = std::sqrt(p.cavity.external_coupling_rate);
  const double rl = std::sqrt(p.cavity.internal_loss_rate);
  const double rm = std::sqrt(p.readout.external_coupling_rate);
  const double ri = std::sqrt(p.readout.internal_loss_rate);
  n(0, 0) = ra;  n(1, 1) = ra;
  n(0, 2) = rl;  n(1, 3) = rl;
  n(2, 4) = rm;  n(3, 5) = rm;
  n(2, 6) = ri;  n(3, 7) = ri;
  return n;
}

// out = in - N^T x with x solved from (-i w - M) x = N in.
Mat8c full_scattering(const SystemParams& p, double detuning) {
  const Mat4 m = build_drift(p);
  Mat4c a = -m.cast<std::complex<double>>();
  const std::complex<double> iw(0.0, detuning);
  for (int i = 0; i < 4; ++i) a(i, i) -= iw;
  Eigen::FullPivLU<Mat4c> lu(a);
  if (!lu.isInvertible())
    throw std::runtime_error("scattering_at: singular network response (undamped mode)");
  const Mat4x8 n = input_coupling(p);
  const Eigen::Matrix<std::complex<double>, 4, 8> g = lu.solve(n.cast<std::complex<double>>());
  return Mat8c::Identity() - (n.transpose().cast<std::complex<double>>() * g);
}

}  // namespace

Mat4 build_drift(const SystemParams& params) {
  params.validate();
  const double ka = params.cavity_total_rate();
  const double km = params.readout_total_rate();
  const double lam = params.rates.g_swap + params.rates.g_tms;
  const double mu = params.rates.g_swap - params.rates.g_tms;
  Mat4 m = Mat4::Zero();
  m(0, 0) = -0.5 * ka;  m(0, 3) = mu;
  m(1, 1) = -0.5 * ka;  m(1, 2) = -lam;
  m(2, 2) = -0.5 * km;  m(2, 1) = mu;
  m(3, 3) = -0.5 * km;  m(3, 0) = -lam;
  return m;
}

QuadratureScattering scattering_at(const SystemParams& params, double detuning) {
  QuadratureScattering s;
  s.detuning = detuning;
  s.matrix = full_scattering(params, detuning).topLeftCorner<6, 6>();
  return s;
}

Mat6 QuadratureScattering::canonical_form() {
  Mat6 j = Mat6::Zero();
  for (int p = 0; p < 3; ++p) {
    j(2 * p, 2 * p + 1) = 1.0;
    j(2 * p + 1, 2 * p) = -1.0;
  }
  return j;
}

Mat12 QuadratureScattering::canonical_form_12() {
  Mat12 j = Mat12::Zero();
  j.topLeftCorner<6, 6>() = canonical_form();
  j.bottomRightCorner<6, 6>() = canonical_form();
  return j;
}

Mat12 QuadratureScattering::real_form() const {
  const Mat6 re = matrix.real();
  const Mat6 im = matrix.imag();
  Mat12 r;
  r.topLeftCorner<6, 6>() = re;
  r.topRightCorner<6, 6>() = -im;
  r.bottomLeftCorner<6, 6>() = im;
  r.bottomRightCorner<6, 6>() = re;
  return r;
}

PortPsd port_psd(const SystemParams& params, double detuning, const PortOccupations& occ) {
  if (occ.axion < 0.0 || occ.loss < 0.0 || occ.measurement < 0.0 || occ.readout_loss < 0.0)
    throw std::invalid_argument("port_psd: occupations must be nonnegative");
  const Mat8c s = full_scattering(params, detuning);

  auto pair_power = [&](int col) { return std::norm(s(kYm, col)); };

  PortPsd out;
  out.detuning = detuning;
  // The measured quadrature couples to one quadrature per port; the
  // orthogonal-sector elements are identically zero, kept in the sums anyway.
  const double psd_a = vacuum_psd_from_quanta(occ.axion);
  const double psd_l = vacuum_psd_from_quanta(occ.loss);
  const double psd_m = vacuum_psd_from_quanta(occ.measurement);
  const double psd_i = vacuum_psd_from_quanta(occ.readout_loss);
  out.signal_gain = pair_power(kXa) + pair_power(kYa);
  out.axion_port_noise = out.signal_gain * psd_a;
  out.cavity_noise = (pair_power(kXl) + pair_power(kYl)) * psd_l;
  out.measurement_noise = (pair_power(kXm) + pair_power(kYm)) * psd_m;
  out.readout_loss_noise = (std::norm(s(kYm, 6)) + std::norm(s(kYm, 7))) * psd_i;
  return out;
}

double phase_preserving_gain(const SystemParams& params, double detuning) {
  const Mat6c s = scattering_at(params, detuning).matrix;
  const std::complex<double> t1 = s(kYm, kXl);  // amplified sector
  const std::complex<double> t2 = s(kXm, kYl);  // orthogonal sector
  return 0.25 * std::norm(t1 - t2);
}

double infer_s_ml(double s_ma, double kappa_l, double kappa_a) {
  if (kappa_a <= 0.0) throw std::invalid_argument("infer_s_ml: kappa_a must be > 0");
  return std::sqrt(kappa_l / kappa_a) * s_ma;
}

}  // namespace qhs
