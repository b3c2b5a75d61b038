#include <doctest.h>

#include "obmimo/analysis.hpp"

using namespace obmimo;

namespace {
constexpr double kPi = 3.14159265358979323846;

NetworkScenario paper_scenario(double Pt_dbw) {
  const double sigma2 = 1e-11;
  return make_scenario(4, 128, 8, std::pow(10.0, Pt_dbw / 10.0), sigma2,
                       1.0 / sigma2, default_geometry(4));
}
}  // namespace

TEST_SUITE("analysis") {

TEST_CASE("antenna ratio at high power matches the reference figure") {
  // kappa(M_conv = 100, P_t = 20 dBW) ~ 3.79.
  const KappaResult kr = kappa_search(paper_scenario(20.0), 100.0);
  CHECK(kr.kappa == doctest::Approx(3.7878).epsilon(2e-3));
  CHECK(kr.achieved_gap <= kr.epsilon * (1.0 + 1e-6));
  CHECK(kr.M_one == doctest::Approx(378.78).epsilon(2e-3));
}

TEST_CASE("antenna ratio at low power approaches pi^2/4") {
  CHECK(low_snr_kappa() == kPi * kPi / 4.0);
  const KappaResult kr = kappa_search(paper_scenario(-30.0), 1000.0);
  CHECK(kr.kappa == doctest::Approx(2.4647).epsilon(2e-3));
  CHECK(std::abs(kr.kappa - low_snr_kappa()) < 0.01);
}

TEST_CASE("matching antenna count for the energy-efficiency setup") {
  // M_conv = 128 at 10 dBW needs M_one ~ 486 one-bit antennas.
  const KappaResult kr = kappa_search(paper_scenario(10.0), 128.0);
  CHECK(kr.M_one_int == 486);
  CHECK(kr.M_one == doctest::Approx(485.5).epsilon(2e-3));
}

TEST_CASE("kappa declines for very large conventional arrays") {
  const NetworkScenario s = paper_scenario(20.0);
  const double k1 = kappa_search(s, 1e5).kappa;
  const double k2 = kappa_search(s, 5e5).kappa;
  const double k3 = kappa_search(s, 1e6).kappa;
  CHECK(k1 > k2);
  CHECK(k2 > k3);
  CHECK(k3 > 1.0);  // still above one on any finite array
}

TEST_CASE("kappa search input validation") {
  const NetworkScenario s = paper_scenario(0.0);
  CHECK_THROWS_AS(kappa_search(s, 8.0), std::invalid_argument);
  CHECK_THROWS_AS(kappa_search(s, 100.0, 0.0), std::invalid_argument);
}

TEST_CASE("per-DAC power at 100 MHz and one bit") {
  // 494 fJ * 1e8 Hz * 2^1 = 9.88e-5 W.
  CHECK(std::abs(p_dac(1e8, 1) - 9.88e-5) <= 1e-12 * 9.88e-5);
  // Exponential in the bit depth.
  CHECK(p_dac(1e8, 10) == doctest::Approx(9.88e-5 * 512.0).epsilon(1e-12));
}

TEST_CASE("energy efficiency arithmetic on hand-picked numbers") {
  PowerModel pm;
  pm.amp_efficiency = 0.5;
  pm.P_RF = 0.04;
  const double fs = 1e8;
  const int M = 10, bits = 1;
  const double consumed = 10.0 / 0.5 + M * (2.0 * p_dac(fs, bits, pm) + 0.04);
  CHECK(energy_efficiency(100.0, pm, M, bits, fs, 10.0) ==
        doctest::Approx(100.0 / consumed).epsilon(1e-14));
}

TEST_CASE("energy-efficiency sweep: shapes and crossover") {
  const NetworkScenario s = paper_scenario(10.0);
  PowerModel pm;  // defaults: 0.39 amplifier efficiency, 40 mW RF chain
  std::vector<double> fs;
  for (double f = 1e7; f <= 1e9; f *= 1.1) fs.push_back(f);
  const auto pts = ee_sweep(s, 128, 10, fs, pm);
  REQUIRE(pts.size() == fs.size());
  // Full-resolution EE strictly decreases in sampling frequency (DAC power
  // grows, rate does not), and is eventually overtaken by the one-bit system.
  double crossover = 0.0;
  for (size_t i = 1; i < pts.size(); ++i) {
    CHECK(pts[i].ee_fr < pts[i - 1].ee_fr);
    const bool was_below = pts[i - 1].ee_onebit < pts[i - 1].ee_fr;
    const bool now_above = pts[i].ee_onebit >= pts[i].ee_fr;
    if (was_below && now_above && crossover == 0.0) crossover = pts[i].f_s;
  }
  CHECK(crossover > 70e6);
  CHECK(crossover < 130e6);
  // Below the crossover the larger one-bit array burns more RF-chain power.
  CHECK(pts.front().ee_onebit < pts.front().ee_fr);
  CHECK(pts.back().ee_onebit > pts.back().ee_fr);
}

}  // TEST_SUITE
