#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>

#include "qhs/qnet.hpp"
#include "qhs/rng.hpp"
#include "qhs/units.hpp"

using namespace qhs;

namespace {

SystemParams make_system(double kl_hz, double ka_hz, double km_hz, double gc_hz, double gg_hz) {
  SystemParams p;
  p.cavity.frequency = rad_from_hz(7.454e9);
  p.cavity.internal_loss_rate = rad_from_hz(kl_hz);
  p.cavity.external_coupling_rate = rad_from_hz(ka_hz);
  p.readout.frequency = rad_from_hz(4.98e9);
  p.readout.external_coupling_rate = rad_from_hz(km_hz);
  p.rates.g_swap = rad_from_hz(gc_hz);
  p.rates.g_tms = rad_from_hz(gg_hz);
  return p;
}

SystemParams paper_ql(double ka_hz = 0.0) {
  SystemParams p = make_system(960e3, ka_hz, 20.6e6, 0.0, 0.0);
  p.rates.g_swap = critical_swap_rate(p.readout.external_coupling_rate,
                                      p.cavity.internal_loss_rate);
  return p;
}

SystemParams paper_gc(double ka_hz = 0.0) { return make_system(960e3, ka_hz, 20.6e6, 7.30e6, 7.30e6); }

SystemParams paper_gci(double ka_hz = 0.0) {
  return make_system(960e3, ka_hz, 20.6e6, 12.25e6, 11.76e6);
}

SystemParams random_system(Rng& rng) {
  const double kl = 1e5 + rng.uniform() * 5e6;
  const double ka = rng.uniform() * 1e4;
  const double km = 1e6 + rng.uniform() * 4e7;
  double gc = rng.uniform() * 15e6;
  double gg = rng.uniform() * gc;  // g_swap >= g_tms keeps the network stable
  return make_system(kl, ka, km, gc, gg);
}

}  // namespace

TEST_CASE("drift matrix: decoupled modes are pure damping") {
  SystemParams p = make_system(960e3, 1220.0, 20.6e6, 0.0, 0.0);
  const Mat4 m = build_drift(p);
  const double ka = p.cavity_total_rate();
  const double km = p.readout_total_rate();
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      if (i != j) {
        CHECK(m(i, j) == doctest::Approx(0.0).epsilon(1e-15));
      }
    }
  CHECK(m(0, 0) == doctest::Approx(-0.5 * ka));
  CHECK(m(1, 1) == doctest::Approx(-0.5 * ka));
  CHECK(m(2, 2) == doctest::Approx(-0.5 * km));
  CHECK(m(3, 3) == doctest::Approx(-0.5 * km));
}

TEST_CASE("drift matrix: balanced rates leave X_A without readout backaction") {
  const Mat4 m = build_drift(paper_gc());
  CHECK(m(0, 2) == 0.0);
  CHECK(m(0, 3) == 0.0);
  // measured quadrature accumulates X_A at rate g_swap + g_tms
  CHECK(m(3, 0) == doctest::Approx(-rad_from_hz(14.60e6)));
}

TEST_CASE("drift matrix: swap-only coupling has equal magnitudes in both sectors") {
  SystemParams p = make_system(960e3, 0.0, 20.6e6, 2.0e6, 0.0);
  const Mat4 m = build_drift(p);
  const double g = rad_from_hz(2.0e6);
  CHECK(m(0, 3) == doctest::Approx(g));
  CHECK(m(1, 2) == doctest::Approx(-g));
  CHECK(m(2, 1) == doctest::Approx(g));
  CHECK(m(3, 0) == doctest::Approx(-g));
}

TEST_CASE("scattering: decoupled network reflects the measurement port at unit magnitude") {
  SystemParams p = make_system(960e3, 1220.0, 20.6e6, 0.0, 0.0);
  for (double hz : {0.0, 0.3e6, -2e6, 9.7e6}) {
    const Mat6c s = scattering_at(p, rad_from_hz(hz)).matrix;
    CHECK(std::abs(s(kYm, kYm)) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(s(kXm, kXm)) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(s(kYm, kXl)) == doctest::Approx(0.0).epsilon(1e-12));
  }
}

TEST_CASE("scattering: quantum-limited critical coupling") {
  const SystemParams p = paper_ql();
  const Mat6c s = scattering_at(p, 0.0).matrix;
  const double smm_sq = std::norm(s(kYm, kYm));
  const double sml_sq = std::norm(s(kYm, kXl));
  CHECK(smm_sq <= 1e-3);
  CHECK(sml_sq == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("scattering: balanced-rate phase-sensitive gain") {
  const SystemParams p = paper_gc();
  const Mat6c s = scattering_at(p, 0.0).matrix;
  const double gain_db = db_from_power(std::norm(s(kYm, kXl)));
  CHECK(gain_db == doctest::Approx(22.0).epsilon(0.05));
  // independent oracle from adiabatic elimination: amplitude gain 8g/sqrt(kl km)
  const double oracle = 8.0 * rad_from_hz(7.30e6) /
                        std::sqrt(p.cavity.internal_loss_rate * p.readout.external_coupling_rate);
  CHECK(std::abs(s(kYm, kXl)) == doctest::Approx(oracle).epsilon(0.01));
  CHECK(oracle == doctest::Approx(13.1).epsilon(0.01));
}

TEST_CASE("effective coupling") {
  CHECK(effective_coupling(0.0, rad_from_hz(20.6e6)) == 0.0);
  const double kl = rad_from_hz(960e3), km = rad_from_hz(20.6e6);
  CHECK(effective_coupling(critical_swap_rate(km, kl), km) == doctest::Approx(kl).epsilon(1e-12));
  const double keff = effective_coupling(rad_from_hz(7.30e6), km);
  CHECK(hz_from_rad(keff) == doctest::Approx(10.35e6).epsilon(1e-3));
  CHECK_THROWS(effective_coupling(1.0, 0.0));
}

TEST_CASE("port psd: perfect mirror when decoupled") {
  SystemParams p = make_system(960e3, 1220.0, 20.6e6, 0.0, 0.0);
  for (double hz : {0.0, 1e6, -4e6}) {
    const PortPsd psd = port_psd(p, rad_from_hz(hz));
    CHECK(psd.measurement_noise == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(psd.cavity_noise == doctest::Approx(0.0).epsilon(1e-12));
  }
}

TEST_CASE("port psd: balanced rates reflect measurement noise at unit level across the band") {
  const SystemParams p = paper_gc();
  for (double hz = -10e6; hz <= 10e6; hz += 0.5e6) {
    const PortPsd psd = port_psd(p, rad_from_hz(hz));
    CHECK(psd.measurement_noise == doctest::Approx(1.0).epsilon(1e-3));
  }
}

TEST_CASE("port psd: quantum-limited resonance is cavity-noise dominated") {
  const PortPsd psd = port_psd(paper_ql(), 0.0);
  CHECK(psd.cavity_noise == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(psd.measurement_noise <= 1e-3);
}

TEST_CASE("port psd: occupations scale the corresponding components") {
  PortOccupations occ;
  occ.loss = 1.5;
  const SystemParams p = paper_ql(1220.0);
  const PortPsd vac = port_psd(p, 0.0);
  const PortPsd hot = port_psd(p, 0.0, occ);
  CHECK(hot.cavity_noise == doctest::Approx(vacuum_psd_from_quanta(1.5) * vac.cavity_noise));
  CHECK(hot.measurement_noise == doctest::Approx(vac.measurement_noise));
}

TEST_CASE("infer_s_ml") {
  CHECK(infer_s_ml(0.0, rad_from_hz(960e3), rad_from_hz(1220.0)) == 0.0);
  CHECK(infer_s_ml(0.37, 5.0, 5.0) == doctest::Approx(0.37));
  CHECK_THROWS(infer_s_ml(1.0, 1.0, 0.0));

  // consistency with the directly computed loss-port transmission
  const SystemParams p = paper_gc(1220.0);
  const Mat6c s = scattering_at(p, rad_from_hz(0.35e6)).matrix;
  const double via_axion = infer_s_ml(std::abs(s(kYm, kXa)), p.cavity.internal_loss_rate,
                                      p.cavity.external_coupling_rate);
  CHECK(via_axion == doctest::Approx(std::abs(s(kYm, kXl))).epsilon(1e-10));
}

TEST_CASE("phase-preserving transmission gain") {
  CHECK(db_from_power(phase_preserving_gain(paper_gc(), 0.0)) == doctest::Approx(16.3).epsilon(0.05));
  CHECK(phase_preserving_gain(paper_ql(), 0.0) == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("invariant: commutator preservation (symplectic scattering)") {
  Rng rng(0xabc123);
  const Mat6 j6 = QuadratureScattering::canonical_form();
  const Mat12 j12 = QuadratureScattering::canonical_form_12();
  for (int trial = 0; trial < 50; ++trial) {
    const SystemParams p = random_system(rng);
    for (int k = 0; k < 20; ++k) {
      const double delta = rad_from_hz((rng.uniform() * 2.0 - 1.0) * 30e6);
      const QuadratureScattering s = scattering_at(p, delta);
      const Mat6c lhs = s.matrix * j6.cast<std::complex<double>>() * s.matrix.adjoint();
      CHECK((lhs - j6.cast<std::complex<double>>()).cwiseAbs().maxCoeff() < 1e-9);
      const Mat12 r = s.real_form();
      CHECK((r * j12 * r.transpose() - j12).cwiseAbs().maxCoeff() < 1e-9);
    }
  }
}

TEST_CASE("invariant: balanced rates give exact QND (no measurement backaction on X outputs)") {
  Rng rng(0x5151);
  for (int trial = 0; trial < 20; ++trial) {
    SystemParams p = random_system(rng);
    p.rates.g_tms = p.rates.g_swap;  // balance
    const double delta = rad_from_hz((rng.uniform() * 2.0 - 1.0) * 10e6);
    const Mat6c s = scattering_at(p, delta).matrix;
    CHECK(std::abs(s(kXa, kYm)) < 1e-12);
    CHECK(std::abs(s(kXl, kYm)) < 1e-12);
    const Mat4 m = build_drift(p);
    CHECK(m(0, 2) == 0.0);
    CHECK(m(0, 3) == 0.0);
  }
}

TEST_CASE("invariant: axion and loss ports see identical network paths") {
  Rng rng(0x77aa);
  for (int trial = 0; trial < 30; ++trial) {
    SystemParams p = random_system(rng);
    p.cavity.external_coupling_rate = rad_from_hz(500.0 + rng.uniform() * 5e3);
    const double delta = rad_from_hz((rng.uniform() * 2.0 - 1.0) * 20e6);
    const Mat6c s = scattering_at(p, delta).matrix;
    const double lhs = std::norm(s(kYm, kXl)) * p.cavity.external_coupling_rate /
                       p.cavity.internal_loss_rate;
    const double rhs = std::norm(s(kYm, kXa));
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
  }
}

TEST_CASE("invariant: critically coupled swap network matches the one-port cavity oracle") {
  for (double ratio : {20.0, 21.5, 40.0}) {
    const double kl_hz = 960e3;
    const double km_hz = ratio * kl_hz;
    SystemParams p = make_system(kl_hz, 0.0, km_hz, 0.0, 0.0);
    p.rates.g_swap = critical_swap_rate(p.readout.external_coupling_rate,
                                        p.cavity.internal_loss_rate);
    const double kl = p.cavity.internal_loss_rate;
    const double keff = effective_coupling(p.rates.g_swap, p.readout.external_coupling_rate);
    for (double x = -5.0; x <= 5.0; x += 0.25) {
      const double delta = x * kl;
      const std::complex<double> num(keff - kl, -2.0 * delta);
      const std::complex<double> den(keff + kl, 2.0 * delta);
      const double oracle = std::norm(num / den);
      const double actual = std::norm(scattering_at(p, delta).matrix(kYm, kYm));
      CHECK(std::abs(actual - oracle) <= 0.02 * std::max(oracle, 0.02));
    }
  }
}

TEST_CASE("invariant: balanced-rate unit reflection of measurement noise at every detuning") {
  Rng rng(0xbead);
  for (int trial = 0; trial < 10; ++trial) {
    SystemParams p = random_system(rng);
    p.rates.g_tms = p.rates.g_swap;
    for (double hz = -25e6; hz <= 25e6; hz += 1.25e6) {
      const PortPsd psd = port_psd(p, rad_from_hz(hz));
      CHECK(psd.measurement_noise == doctest::Approx(1.0).epsilon(1e-6));
    }
  }
}

TEST_CASE("scattering failure: undamped network is singular on resonance") {
  SystemParams p = make_system(1.0, 0.0, 1.0, 0.0, 0.0);
  p.cavity.internal_loss_rate = 0.0;
  p.readout.external_coupling_rate = 0.0;
  p.cavity.external_coupling_rate = 1e-300;
  p.readout.internal_loss_rate = 1e-300;
  CHECK_THROWS(scattering_at(p, 0.0));
}
