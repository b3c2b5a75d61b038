// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// criterion fails. argv[1] is the path of the obmimo CLI binary (used by the
// determinism criterion).
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "obmimo/analysis.hpp"
#include "obmimo/channel.hpp"
#include "obmimo/estimation.hpp"
#include "obmimo/precoding.hpp"
#include "obmimo/quantize.hpp"
#include "obmimo/rates.hpp"
#include "obmimo/scenario.hpp"

using namespace obmimo;

namespace {

constexpr double kPi = 3.14159265358979323846;

int worker_threads() {
  const unsigned hc = std::thread::hardware_concurrency();
  return static_cast<int>(std::clamp(hc, 1u, 8u));
}

NetworkScenario paper_scenario(double Pt_dbw, int M = 128) {
  const double sigma2 = 1e-11;
  return make_scenario(4, M, 8, std::pow(10.0, Pt_dbw / 10.0), sigma2,
                       1.0 / sigma2, default_geometry(4));
}

struct Line {
  bool pass = true;
  std::ostringstream detail;
};

void emit(int n, const Line& l) {
  std::printf("criterion %d: %s —%s\n", n, l.pass ? "PASS" : "FAIL",
              l.detail.str().c_str());
  std::fflush(stdout);
}

// ---- criterion 1: exact algebraic identities --------------------------------

Line criterion1() {
  Line r;
  const NetworkScenario s = paper_scenario(10.0);
  const TrainingStats ts = training_stats(s);
  const double t_err =
      arma::abs(ts.t_one - (2.0 / kPi) * ts.t_fr).max() / ts.t_one.min();
  const DegradationRatios d = degradation_ratios(s);
  const double pc_err = std::max(std::abs(d.pc.min() - 1.0),
                                 std::abs(d.pc.max() - 1.0));
  const RngStream rng(1);
  const ChannelRealization ch = draw_channels(s, rng, 0);
  const PilotObservations obs = pilot_observations(s, ch, rng, 0);
  double zf_err = 0.0;
  const arma::cx_mat I = arma::eye<arma::cx_mat>(
      static_cast<arma::uword>(s.K), static_cast<arma::uword>(s.K));
  for (const auto& est : {estimate_onebit(s, ts, obs), estimate_fr(s, ts, obs)})
    for (int j = 0; j < s.L; ++j) {
      const arma::cx_mat& Hhat = est.Hhat[static_cast<size_t>(j)];
      zf_err = std::max(zf_err, arma::abs(Hhat.t() * zf_precoder(Hhat) - I).max());
    }
  r.pass = t_err < 1e-12 && pc_err == 0.0 && zf_err <= 1e-8;
  r.detail << " max rel |t - (2/pi) t_fr| = " << t_err
           << " (tol 1e-12); |PC ratio - 1| = " << pc_err
           << " (exact); max |Hhat^H W - I| = " << zf_err << " (tol 1e-8)";
  return r;
}

// ---- criterion 2: Bussgang statistics of the sampled transmit noise ---------

Line criterion2() {
  Line r;
  const NetworkScenario s = paper_scenario(10.0);  // M = 128, K = 8
  const TrainingStats ts = training_stats(s);
  const RngStream rng(1);
  const long T = 600;
  const int D = 200;  // 120000 pooled (trial, draw) samples
  const arma::uword M = static_cast<arma::uword>(s.M);

  // Trial means of q q^H and x q^H (exact per-realization gain, cell 0) with
  // elementwise squares for trial-level standard errors: draws inside a trial
  // share the precoder, so the trial is the independent unit.
  arma::mat qq_re(M, M, arma::fill::zeros), qq_re2(M, M, arma::fill::zeros);
  arma::mat qq_im(M, M, arma::fill::zeros), qq_im2(M, M, arma::fill::zeros);
  arma::mat xq_re(M, M, arma::fill::zeros), xq_re2(M, M, arma::fill::zeros);
  arma::mat xq_im(M, M, arma::fill::zeros), xq_im2(M, M, arma::fill::zeros);

  for (long t = 0; t < T; ++t) {
    const ChannelRealization ch = draw_channels(s, rng, static_cast<uint64_t>(t));
    const PilotObservations obs =
        pilot_observations(s, ch, rng, static_cast<uint64_t>(t));
    const ChannelEstimates est = estimate_onebit(s, ts, obs);
    const arma::cx_mat W = zf_precoder(est.Hhat[0]);
    const arma::vec a = exact_transmit_gain(W);
    auto g = rng.engine(Stream::kSymbols, {static_cast<uint64_t>(t), 0});
    arma::cx_mat S(static_cast<arma::uword>(s.K), static_cast<arma::uword>(D));
    for (arma::uword c = 0; c < S.n_cols; ++c)
      for (arma::uword rr = 0; rr < S.n_rows; ++rr)
        S(rr, c) = complex_gaussian(g);
    const arma::cx_mat X = W * S;
    arma::cx_mat Q = quantize(X);
    arma::cx_mat Xs = X;
    Xs.each_col() %= arma::conv_to<arma::cx_vec>::from(a);
    Q -= Xs;
    const arma::cx_mat Mqq = Q * Q.t() / D;  // .t() = conjugate transpose
    const arma::cx_mat Mxq = X * Q.t() / D;
    const arma::mat mr1 = arma::real(Mqq), mi1 = arma::imag(Mqq);
    const arma::mat mr2 = arma::real(Mxq), mi2 = arma::imag(Mxq);
    qq_re += mr1;
    qq_re2 += arma::square(mr1);
    qq_im += mi1;
    qq_im2 += arma::square(mi1);
    xq_re += mr2;
    xq_re2 += arma::square(mr2);
    xq_im += mi2;
    xq_im2 += arma::square(mi2);
  }

  arma::mat target(M, M, arma::fill::zeros);
  target.diag().fill(1.0 - 2.0 / kPi);
  auto zmat = [&](const arma::mat& sum, const arma::mat& sum2,
                  const arma::mat& tgt) -> arma::mat {
    const arma::mat mean = sum / T;
    const arma::mat var = arma::clamp(sum2 / T - arma::square(mean), 1e-300,
                                      arma::datum::inf);
    return arma::abs(mean - tgt) / arma::sqrt(var / T);
  };
  const arma::mat zs[] = {zmat(qq_re, qq_re2, target),
                          zmat(qq_im, qq_im2, arma::mat(M, M, arma::fill::zeros)),
                          zmat(xq_re, xq_re2, arma::mat(M, M, arma::fill::zeros)),
                          zmat(xq_im, xq_im2, arma::mat(M, M, arma::fill::zeros))};
  double zmax = 0.0, over = 0.0, total = 0.0;
  for (const auto& z : zs) {
    zmax = std::max(zmax, z.max());
    over += arma::accu(arma::conv_to<arma::mat>::from(z > 3.0));
    total += static_cast<double>(z.n_elem);
  }
  const double frac = over / total;
  const long n_samples = T * D;
  // "Within 3 SE entrywise" over 65536 statistics is read as a multiple-
  // comparisons bound: the null itself exceeds 3 SE on 0.27% of entries, so
  // pass when the violation share stays below 0.5% and no entry strays
  // beyond 6 SE.
  r.pass = n_samples >= 100000 && frac <= 0.005 && zmax <= 6.0;
  r.detail << " R_qq vs (1-2/pi) I and E[x q^H] vs 0 over " << n_samples
           << " samples, " << static_cast<long>(total)
           << " entrywise stats: frac(|z|>3) = " << frac
           << " (tol 0.005), max |z| = " << zmax << " (tol 6)";
  return r;
}

// ---- criterion 3: Monte-Carlo vs closed forms -------------------------------

Line criterion3() {
  Line r;
  const RngStream rng(1);
  McOptions opt;
  opt.trials = 2000;
  opt.symbol_draws = 200;
  opt.gain_model = GainModel::kExactDiag;
  opt.threads = worker_threads();
  const McMoments m = mc_accumulate(paper_scenario(0.0), opt, rng);

  double worst = 0.0;
  std::ostringstream detail;
  for (double pt : {-10.0, 0.0, 10.0}) {
    const NetworkScenario s = paper_scenario(pt);
    for (int mode = 0; mode < 2; ++mode) {
      const bool onebit = (mode == 0);
      const RateBreakdown mc = mc_assemble(
          s, m, onebit ? RateMode::kMcOneBit : RateMode::kMcFullRes);
      const RateBreakdown cf = onebit ? cf_rates_onebit(s) : cf_rates_fr(s);
      const arma::mat rel = arma::abs(mc.rate - cf.rate) / cf.rate;
      const double max_gap = rel.max();
      const double mean_gap = arma::mean(arma::vectorise(rel));
      const double se = (mc.rate_se / cf.rate).max();
      worst = std::max(worst, max_gap);
      detail << " [" << (onebit ? "one-bit" : "fullres") << " " << pt
             << " dBW: max " << max_gap * 100 << "%, mean " << mean_gap * 100
             << "%, max rel SE " << se * 100 << "%]";
    }
  }
  r.pass = worst <= 0.05;
  r.detail << " per-user rate gap, 2000 trials x 200 draws, tol 5% per user:"
           << detail.str();
  return r;
}

// ---- criterion 4: figure-level closed-form reproduction ---------------------

Line criterion4() {
  Line r;
  const NetworkScenario s128 = paper_scenario(10.0);
  const double one128 = cf_rates_onebit(s128).sum_rate_per_user;
  const double fr128 = cf_rates_fr(s128).sum_rate_per_user;
  const double asym = cf_rates_asymptotic(s128).sum_rate_per_user;
  const NetworkScenario s800 = paper_scenario(10.0, 800);
  const double frac_one = cf_rates_onebit(s800).sum_rate_per_user / asym;
  const double frac_fr = cf_rates_fr(s800).sum_rate_per_user / asym;
  auto within = [](double v, double ref) {
    return std::abs(v - ref) <= 0.10 * ref;
  };
  r.pass = within(one128, 1.87) && within(fr128, 2.94) &&
           within(asym, 4.47) && within(frac_one, 0.73) &&
           within(frac_fr, 0.88);
  r.detail << " M=128: one-bit " << one128 << " (ref 1.87), FR " << fr128
           << " (ref 2.94); asymptote " << asym
           << " (ref 4.47); M=800 fractions " << frac_one << "/" << frac_fr
           << " (ref 0.73/0.88); tol 10%";
  return r;
}

// ---- criterion 5: antenna-ratio behavior ------------------------------------

Line criterion5() {
  Line r;
  const double k_low = kappa_search(paper_scenario(-30.0), 1000.0).kappa;
  const double k_high = kappa_search(paper_scenario(20.0), 100.0).kappa;
  const NetworkScenario s20 = paper_scenario(20.0);
  const double k1 = kappa_search(s20, 1e5).kappa;
  const double k2 = kappa_search(s20, 5e5).kappa;
  const double k3 = kappa_search(s20, 1e6).kappa;
  r.pass = k_low >= 2.3 && k_low <= 2.6 && std::abs(k_high - 3.79) <= 0.2 &&
           k1 > k2 && k2 > k3;
  r.detail << " kappa(-30 dBW, M_conv=1e3) = " << k_low
           << " (range [2.3, 2.6]); kappa(20 dBW, M_conv=1e2) = " << k_high
           << " (ref 3.79 +/- 0.2); kappa at M_conv {1e5, 5e5, 1e6} = {" << k1
           << ", " << k2 << ", " << k3 << "} strictly decreasing";
  return r;
}

// ---- criterion 6: energy-efficiency model -----------------------------------

Line criterion6() {
  Line r;
  const double p = p_dac(1e8, 1);
  const double p_err = std::abs(p - 9.88e-5) / 9.88e-5;
  const NetworkScenario s = paper_scenario(10.0);
  PowerModel pm;  // documented defaults: 0.39 amplifier efficiency, 40 mW RF
  std::vector<double> fs;
  for (double f = 2e7; f <= 1.0e9; f *= 1.05) fs.push_back(f);
  const auto pts = ee_sweep(s, 128, 10, fs, pm);
  bool fr_decreasing = true;
  double crossover = 0.0;
  for (size_t i = 1; i < pts.size(); ++i) {
    fr_decreasing = fr_decreasing && pts[i].ee_fr < pts[i - 1].ee_fr;
    if (crossover == 0.0 && pts[i - 1].ee_onebit < pts[i - 1].ee_fr &&
        pts[i].ee_onebit >= pts[i].ee_fr) {
      // Linear interpolation of the sign change.
      const double d0 = pts[i - 1].ee_fr - pts[i - 1].ee_onebit;
      const double d1 = pts[i].ee_onebit - pts[i].ee_fr;
      crossover = pts[i - 1].f_s +
                  (pts[i].f_s - pts[i - 1].f_s) * d0 / (d0 + d1);
    }
  }
  r.pass = p_err <= 1e-12 && fr_decreasing && crossover >= 70e6 &&
           crossover <= 130e6;
  r.detail << " P_DAC(100 MHz, 1 bit) = " << p << " W (rel err " << p_err
           << ", tol 1e-12); EE_fr strictly decreasing: "
           << (fr_decreasing ? "yes" : "no") << "; crossover = "
           << crossover / 1e6 << " MHz (range [70, 130])";
  return r;
}

// ---- criterion 7: byte-identical reruns through the real CLI ----------------

int run_cli(const std::string& cmd) {
  const int status = std::system(cmd.c_str());
  return status < 0 ? status : WEXITSTATUS(status);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Line criterion7(const std::string& cli) {
  Line r;
  const std::string dir = "/tmp/obmimo_acceptance";
  if (std::system(("mkdir -p " + dir).c_str()) != 0) {
    r.pass = false;
    r.detail << " could not create " << dir;
    return r;
  }
  const std::string cfg = dir + "/cfg.json";
  {
    std::ofstream out(cfg);
    out << R"({"pt_dbw": [-10, 10], "trials": 40, "symbol_draws": 30,
               "m_conv": [100], "kappa_pt_dbw": [0, 20], "fs_hz": [5e7, 2e8]})";
  }
  struct Run {
    const char* label;
    std::string args;
  };
  const Run runs[] = {
      {"rate-sweep csv", "rate-sweep --config " + cfg + " --seed 5"},
      {"kappa json", "kappa --config " + cfg + " --format json"},
      {"ee csv", "ee --config " + cfg},
  };
  bool ok = true;
  std::ostringstream detail;
  for (const auto& run : runs) {
    const std::string a = dir + "/a.out", b = dir + "/b.out";
    const int ra = run_cli(cli + " " + run.args + " --parallel 1 --out " + a);
    const int rb = run_cli(cli + " " + run.args + " --parallel 4 --out " + b);
    const bool same = ra == 0 && rb == 0 && slurp(a) == slurp(b) &&
                      !slurp(a).empty();
    ok = ok && same;
    detail << " [" << run.label << ": exit " << ra << "/" << rb << ", "
           << (same ? "byte-identical" : "MISMATCH") << "]";
  }
  r.pass = ok;
  r.detail << " two runs per command, --parallel 1 vs 4:" << detail.str();
  return r;
}

}  // namespace

int main(int argc, char** argv) {
  const std::string cli = argc > 1 ? argv[1] : "";
  int failures = 0;
  const Line lines[] = {
      criterion1(), criterion2(), criterion3(), criterion4(),
      criterion5(), criterion6(),
      cli.empty() ? [] {
        Line l;
        l.pass = false;
        l.detail << " CLI path argument missing";
        return l;
      }() : criterion7(cli)};
  for (int i = 0; i < 7; ++i) {
    emit(i + 1, lines[i]);
    if (!lines[i].pass) ++failures;
  }
  return failures;
}
