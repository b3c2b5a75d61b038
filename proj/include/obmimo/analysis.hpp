// Antenna-dimensioning (kappa) search and the energy-efficiency model.
#pragma once

#include <vector>

#include "obmimo/rates.hpp"
#include "obmimo/scenario.hpp"

namespace obmimo {

struct KappaResult {
  double M_conv = 0.0;
  double M_one = 0.0;  // continuous relaxation; formulas are smooth in M
  long M_one_int = 0;  // nearest integer, for deployment-style reading
  double kappa = 0.0;  // M_one / M_conv
  double achieved_gap = 0.0;  // |per-user sum rate difference|, <= epsilon
  double epsilon = 1e-3;
  long iterations = 0;
};

// Smallest antenna count M_one (continuous, bisection) whose one-bit per-user
// sum average rate is within epsilon of the full-resolution system's at
// M_conv antennas. The closed-form rate is strictly increasing in M toward
// the shared asymptote, so the root is unique; monotonicity is probed on the
// bracket before bisecting. Gap and epsilon are on the per-user sum average
// rate (the scale the rate figures are plotted in).
KappaResult kappa_search(const NetworkScenario& scenario_template,
                         double M_conv, double epsilon = 1e-3);

// Low-SNR limit of kappa: pi^2/4 (about 2.47).
double low_snr_kappa();

struct PowerModel {
  double amp_efficiency = 0.39;   // power-amplifier efficiency, (0, 1]
  double P_RF = 0.040;            // watts per RF chain, excluding DACs
  double dac_const = 494e-15;     // J/step/Hz (494 fJ)
};

// Per-DAC power: dac_const * f_s * 2^b. Two DACs per antenna (I and Q).
double p_dac(double f_s, int bits, const PowerModel& pm = PowerModel{});

// EE = R_sum_total / (P_t/amp_efficiency + M*(2*P_DAC + P_RF)),
// in bits/s/Hz per watt.
double energy_efficiency(double sum_rate_total, const PowerModel& pm, int M,
                         int bits, double f_s, double Pt);

struct EePoint {
  double f_s = 0.0;
  double ee_onebit = 0.0;
  double ee_fr = 0.0;
};

// EE across sampling frequency for a full-resolution system at M_conv
// antennas / b_fr bits versus a one-bit system sized by kappa_search to match
// its sum rate. Each system uses its own closed-form sum rate (equal within
// the search epsilon).
std::vector<EePoint> ee_sweep(const NetworkScenario& scenario_template,
                              int M_conv, int b_fr,
                              const std::vector<double>& fs_grid,
                              const PowerModel& pm, double epsilon = 1e-3);

}  // namespace obmimo
