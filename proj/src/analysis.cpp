#include "obmimo/analysis.hpp"

#include <cmath>
#include <stdexcept>

namespace obmimo {

namespace {

constexpr double kPi = 3.14159265358979323846;

double onebit_per_user_rate(const NetworkScenario& s, double M) {
  return arma::mean(arma::vectorise(
      cf_rate_matrix_onebit(s.beta, s.rho_p, M, s.K, s.Pt, s.sigma2)));
}

}  // namespace

KappaResult kappa_search(const NetworkScenario& scenario_template,
                         double M_conv, double epsilon) {
  const NetworkScenario& s = scenario_template;
  s.validate();
  if (!(M_conv > s.K))
    throw std::invalid_argument("kappa: M_conv must exceed K");
  if (!(epsilon > 0.0))
    throw std::invalid_argument("kappa: epsilon must be positive");

  const double target = arma::mean(arma::vectorise(
      cf_rate_matrix_fr(s.beta, s.rho_p, M_conv, s.K, s.Pt, s.sigma2)));

  KappaResult kr;
  kr.M_conv = M_conv;
  kr.epsilon = epsilon;

  // The one-bit rate climbs from ~0 just above M = K toward the shared
  // asymptote, which exceeds any finite-M full-resolution rate, so
  // R_one(M) = target - epsilon has a root. Find an upper bracket first.
  double lo = s.K + 1.0;
  auto f = [&](double M) { return onebit_per_user_rate(s, M) - (target - epsilon); };
  if (f(lo) >= 0.0) {
    kr.M_one = lo;
    kr.M_one_int = std::llround(lo);
    kr.kappa = lo / M_conv;
    kr.achieved_gap = std::abs(target - onebit_per_user_rate(s, lo));
    return kr;
  }
  double hi = std::max(M_conv, 2.0 * s.K);
  long iters = 0;
  while (f(hi) < 0.0) {
    hi *= 2.0;
    if (++iters > 200)
      throw std::runtime_error("kappa: failed to bracket the matching M");
  }

  // Probe monotonicity on the bracket before trusting bisection.
  double prev = onebit_per_user_rate(s, lo);
  for (int i = 1; i <= 8; ++i) {
    const double M = lo + (hi - lo) * i / 8.0;
    const double cur = onebit_per_user_rate(s, M);
    if (cur < prev - 1e-12)
      throw std::runtime_error("kappa: one-bit rate not monotone in M");
    prev = cur;
  }

  while (hi - lo > 1e-6) {
    const double mid = 0.5 * (lo + hi);
    if (f(mid) < 0.0)
      lo = mid;
    else
      hi = mid;
    ++iters;
  }
  kr.M_one = hi;  // smallest M with gap <= epsilon
  kr.M_one_int = std::llround(kr.M_one);
  kr.kappa = kr.M_one / M_conv;
  kr.achieved_gap = std::abs(target - onebit_per_user_rate(s, kr.M_one));
  kr.iterations = iters;
  return kr;
}

double low_snr_kappa() { return kPi * kPi / 4.0; }

double p_dac(double f_s, int bits, const PowerModel& pm) {
  return pm.dac_const * f_s * std::ldexp(1.0, bits);
}

double energy_efficiency(double sum_rate_total, const PowerModel& pm, int M,
                         int bits, double f_s, double Pt) {
  const double consumed =
      Pt / pm.amp_efficiency + M * (2.0 * p_dac(f_s, bits, pm) + pm.P_RF);
  return sum_rate_total / consumed;
}

std::vector<EePoint> ee_sweep(const NetworkScenario& scenario_template,
                              int M_conv, int b_fr,
                              const std::vector<double>& fs_grid,
                              const PowerModel& pm, double epsilon) {
  const NetworkScenario& s = scenario_template;
  const KappaResult kr = kappa_search(s, M_conv, epsilon);
  const int M_one = static_cast<int>(kr.M_one_int);

  const double users = static_cast<double>(s.L) * s.K;
  const double r_fr =
      users * arma::mean(arma::vectorise(cf_rate_matrix_fr(
                  s.beta, s.rho_p, M_conv, s.K, s.Pt, s.sigma2)));
  const double r_one =
      users * arma::mean(arma::vectorise(cf_rate_matrix_onebit(
                  s.beta, s.rho_p, M_one, s.K, s.Pt, s.sigma2)));

  std::vector<EePoint> out;
  out.reserve(fs_grid.size());
  for (double fs : fs_grid) {
    EePoint p;
    p.f_s = fs;
    p.ee_onebit = energy_efficiency(r_one, pm, M_one, 1, fs, s.Pt);
    p.ee_fr = energy_efficiency(r_fr, pm, M_conv, b_fr, fs, s.Pt);
    out.push_back(p);
  }
  return out;
}

}  // namespace obmimo
