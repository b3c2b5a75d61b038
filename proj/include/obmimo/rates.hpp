// Per-user ergodic downlink rates, three ways: Monte-Carlo simulation,
// closed forms (one-bit and full-resolution) and the shared large-M limit,
// plus the one-bit/full-resolution degradation ratios.
#pragma once

#include <armadillo>
#include <cstdint>
#include <vector>

#include "obmimo/rng.hpp"
#include "obmimo/scenario.hpp"

namespace obmimo {

enum class RateMode { kMcOneBit, kMcFullRes, kCfOneBit, kCfFullRes, kAsymptotic };

// Linearization used inside the Monte-Carlo effective-channel decomposition.
//   kExactDiag: per-realization diagonal gain sqrt(2/pi)/sqrt(diag(W W^H)).
//               The decomposition's orthogonality premises (E[x q^H] = 0,
//               E[s q^H] = 0) hold exactly, so the measured SQINR is a true
//               achievable-rate bound of the simulated link. Default.
//   kStatistical: deterministic-equivalent scalar gain; matches the closed
//               forms' definition but leaves O(1/K) residual correlation
//               between the linear part and the sampled quantization noise.
enum class GainModel { kExactDiag, kStatistical };

struct RateBreakdown {
  RateMode mode = RateMode::kCfOneBit;
  int L = 0, K = 0;
  // ds is the raw desired-signal power; the interference terms below are
  // normalized by ds. Monte-Carlo folds pilot contamination into iui (the
  // estimator cannot split them); pc is then zero.
  arma::mat ds, cu, qn, iui, pc, tn;
  arma::mat gamma;    // SQINR
  arma::mat rate;     // log2(1 + gamma), bits/s/Hz
  arma::mat rate_se;  // batch-means standard error (zero for closed forms)
  double sum_rate = 0.0;           // total over all L*K users
  double sum_rate_per_user = 0.0;  // sum_rate / (L*K)
  double sum_rate_per_user_se = 0.0;
};

// ---- closed forms ----------------------------------------------------------

RateBreakdown cf_rates_onebit(const NetworkScenario& s);
RateBreakdown cf_rates_fr(const NetworkScenario& s);
// Shared M -> infinity limit: rate = log2(1 + 1/PC_bar), both architectures.
RateBreakdown cf_rates_asymptotic(const NetworkScenario& s);

// Closed forms with a continuous antenna count (the expressions are smooth in
// M); used by the antenna-ratio search.
arma::mat cf_rate_matrix_onebit(const arma::cube& beta, double rho_p, double M,
                                int K, double Pt, double sigma2);
arma::mat cf_rate_matrix_fr(const arma::cube& beta, double rho_p, double M,
                            int K, double Pt, double sigma2);

// One-bit to full-resolution ratios of the normalized SQINR terms:
//   tn:  pi^2 M / (4 K (c-1))            -> pi^2/4 as c grows
//   cu:  (pi/2)(beta - (2/pi) t_fr)/(beta - t_fr)  > pi/2
//   iui: per the closed-form expansion, > pi/2
//   pc:  exactly 1 (pilot contamination is unaffected by quantization)
struct DegradationRatios {
  arma::mat tn, cu, iui, pc;  // (L,K)
};
DegradationRatios degradation_ratios(const NetworkScenario& s);

// ---- Monte-Carlo engine -----------------------------------------------------

struct McOptions {
  long trials = 2000;
  int symbol_draws = 200;     // quantization-noise sampling per trial
  GainModel gain_model = GainModel::kExactDiag;
  int threads = 1;
  int batches = 10;           // batch-means groups for standard errors
};

// Accumulated trial moments. Everything here is independent of P_t (the power
// normalization enters only at assembly), so one accumulation serves a whole
// transmit-power sweep. One-bit and full-resolution moments come from the same
// channel/pilot draws (coupled trials).
struct McMoments {
  int L = 0, K = 0;
  long trials = 0;
  int symbol_draws = 0;
  GainModel gain_model = GainModel::kExactDiag;
  std::vector<long> batch_trials;  // trials contributing to each batch
  // Per batch: effective-gain first/second moments e, p (victim j,k);
  // interference sums iui(l, j, k) = sum_m Exp|h_ljk^H A_l w_lm|^2 (m != k
  // for l == j) and quantization-noise quadratic forms qn(l, j, k).
  std::vector<arma::cx_mat> e_one, e_fr;      // (L,K) per batch
  std::vector<arma::mat> p_one, p_fr;         // (L,K) per batch
  std::vector<arma::cube> iui_one, iui_fr;    // (L,L,K) per batch
  std::vector<arma::cube> qn_one;             // (L,L,K) per batch
};

McMoments mc_accumulate(const NetworkScenario& s, const McOptions& opt,
                        const RngStream& rng);

// Assemble a rate breakdown for the scenario's P_t from accumulated moments.
// mode must be kMcOneBit or kMcFullRes.
RateBreakdown mc_assemble(const NetworkScenario& s, const McMoments& m,
                          RateMode mode);

// Convenience: accumulate + assemble in one call.
RateBreakdown mc_rate_breakdown(const NetworkScenario& s, long trials,
                                int symbol_draws, RateMode mode,
                                const RngStream& rng,
                                GainModel gain_model = GainModel::kExactDiag,
                                int threads = 1);

}  // namespace obmimo
