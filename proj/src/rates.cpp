#include "obmimo/rates.hpp"

#include <atomic>
#include <cmath>
#include <complex>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "obmimo/channel.hpp"
#include "obmimo/estimation.hpp"
#include "obmimo/precoding.hpp"
#include "obmimo/quantize.hpp"

// The trial kernel issues many small GEMMs from worker threads; a threaded
// BLAS would oversubscribe and could reorder reductions. Pin it to one thread
// so results are bit-identical regardless of --parallel.
extern "C" void openblas_set_num_threads(int);

namespace obmimo {

namespace {

constexpr double kPi = 3.14159265358979323846;

void size_breakdown(RateBreakdown& r, int L, int K) {
  r.L = L;
  r.K = K;
  r.ds.zeros(L, K);
  r.cu.zeros(L, K);
  r.qn.zeros(L, K);
  r.iui.zeros(L, K);
  r.pc.zeros(L, K);
  r.tn.zeros(L, K);
  r.gamma.zeros(L, K);
  r.rate.zeros(L, K);
  r.rate_se.zeros(L, K);
}

void finalize_breakdown(RateBreakdown& r) {
  r.gamma = 1.0 / (r.cu + r.qn + r.iui + r.pc + r.tn);
  r.rate = arma::log2(1.0 + r.gamma);
  r.sum_rate = arma::accu(r.rate);
  r.sum_rate_per_user = r.sum_rate / (r.L * r.K);
}

// Normalized SQINR terms of the one-bit closed form at (possibly fractional)
// antenna count M. All terms are relative to the desired-signal power
// ds = eta * A_j^2 with eta = Pt/M and the deterministic-equivalent gain A_j.
void cf_core_onebit(const arma::cube& beta, const TrainingStats& ts, double M,
                    int K, double Pt, double sigma2, RateBreakdown& r) {
  const int L = static_cast<int>(beta.n_rows);
  const double c = M / K;
  size_breakdown(r, L, K);
  for (int j = 0; j < L; ++j) {
    const double zj = ts.zeta_one(j);
    for (int k = 0; k < K; ++k) {
      const double b = beta(j, j, k);
      const double t = ts.t_one(j, k);
      double cu = (b - t) / ((M - K) * t);
      double qn = 0.0;
      for (int l = 0; l < L; ++l)
        qn += (1.0 - 2.0 / kPi) * kPi * M * beta(l, j, k) * zj /
              (2.0 * K * (c - 1.0) * (c - 1.0));
      double iui = 0.0;
      for (int m = 0; m < K; ++m)
        if (m != k) iui += (b - t) / (ts.t_one(j, m) * (M - K));
      for (int l = 0; l < L; ++l) {
        if (l == j) continue;
        const double blj = beta(l, j, k);
        const double zl = ts.zeta_one(l);
        for (int m = 0; m < K; ++m)
          if (m != k) iui += zj * blj / (zl * ts.t_one(l, m) * (M - K));
        iui += zj * blj / (zl * ts.t_one(l, k) * (M - K)) *
               (1.0 - ts.t_one(l, k) * blj / (beta(l, l, k) * beta(l, l, k)));
      }
      double pc = 0.0;
      for (int l = 0; l < L; ++l)
        if (l != j)
          pc += zj * beta(l, j, k) * beta(l, j, k) /
                (ts.zeta_one(l) * beta(l, l, k) * beta(l, l, k));
      const double tn =
          kPi * M * sigma2 * zj / (2.0 * K * Pt * (c - 1.0) * (c - 1.0));
      r.ds(j, k) = (Pt / M) * 2.0 * K * (c - 1.0) * (c - 1.0) / (kPi * zj);
      r.cu(j, k) = cu;
      r.qn(j, k) = qn;
      r.iui(j, k) = iui;
      r.pc(j, k) = pc;
      r.tn(j, k) = tn;
    }
  }
  finalize_breakdown(r);
}

// Full-resolution counterpart: same structure with the full-resolution
// estimate variances, no quantization noise, and ds = eta_fr.
void cf_core_fr(const arma::cube& beta, const TrainingStats& ts, double M,
                int K, double Pt, double sigma2, RateBreakdown& r) {
  const int L = static_cast<int>(beta.n_rows);
  size_breakdown(r, L, K);
  for (int j = 0; j < L; ++j) {
    const double zj = ts.zeta_fr(j);
    for (int k = 0; k < K; ++k) {
      const double b = beta(j, j, k);
      const double t = ts.t_fr(j, k);
      double cu = (b - t) / ((M - K) * t);
      double iui = 0.0;
      for (int m = 0; m < K; ++m)
        if (m != k) iui += (b - t) / (ts.t_fr(j, m) * (M - K));
      for (int l = 0; l < L; ++l) {
        if (l == j) continue;
        const double blj = beta(l, j, k);
        const double zl = ts.zeta_fr(l);
        for (int m = 0; m < K; ++m)
          if (m != k) iui += zj * blj / (zl * ts.t_fr(l, m) * (M - K));
        iui += zj * blj / (zl * ts.t_fr(l, k) * (M - K)) *
               (1.0 - ts.t_fr(l, k) * blj / (beta(l, l, k) * beta(l, l, k)));
      }
      double pc = 0.0;
      for (int l = 0; l < L; ++l)
        if (l != j)
          pc += zj * beta(l, j, k) * beta(l, j, k) /
                (ts.zeta_fr(l) * beta(l, l, k) * beta(l, l, k));
      const double tn = sigma2 * K * zj / (Pt * (M - K));
      r.ds(j, k) = Pt * (M - K) / (K * zj);
      r.cu(j, k) = cu;
      r.iui(j, k) = iui;
      r.pc(j, k) = pc;
      r.tn(j, k) = tn;
    }
  }
  finalize_breakdown(r);
}

}  // namespace

RateBreakdown cf_rates_onebit(const NetworkScenario& s) {
  s.validate();
  RateBreakdown r;
  r.mode = RateMode::kCfOneBit;
  cf_core_onebit(s.beta, training_stats(s), s.M, s.K, s.Pt, s.sigma2, r);
  return r;
}

RateBreakdown cf_rates_fr(const NetworkScenario& s) {
  s.validate();
  RateBreakdown r;
  r.mode = RateMode::kCfFullRes;
  cf_core_fr(s.beta, training_stats(s), s.M, s.K, s.Pt, s.sigma2, r);
  return r;
}

RateBreakdown cf_rates_asymptotic(const NetworkScenario& s) {
  s.validate();
  const TrainingStats ts = training_stats(s);
  RateBreakdown r;
  r.mode = RateMode::kAsymptotic;
  size_breakdown(r, s.L, s.K);
  r.ds.ones(s.L, s.K);
  for (int j = 0; j < s.L; ++j)
    for (int k = 0; k < s.K; ++k) {
      double pc = 0.0;
      for (int l = 0; l < s.L; ++l)
        if (l != j)
          pc += ts.zeta_bar(j) * s.beta(l, j, k) * s.beta(l, j, k) /
                (ts.zeta_bar(l) * s.beta(l, l, k) * s.beta(l, l, k));
      r.pc(j, k) = pc;
    }
  finalize_breakdown(r);
  return r;
}

arma::mat cf_rate_matrix_onebit(const arma::cube& beta, double rho_p, double M,
                                int K, double Pt, double sigma2) {
  if (!(M > K))
    throw std::invalid_argument("rates: M must exceed K (zero-forcing)");
  RateBreakdown r;
  cf_core_onebit(beta, training_stats_core(beta, rho_p, K), M, K, Pt, sigma2,
                 r);
  return r.rate;
}

arma::mat cf_rate_matrix_fr(const arma::cube& beta, double rho_p, double M,
                            int K, double Pt, double sigma2) {
  if (!(M > K))
    throw std::invalid_argument("rates: M must exceed K (zero-forcing)");
  RateBreakdown r;
  cf_core_fr(beta, training_stats_core(beta, rho_p, K), M, K, Pt, sigma2, r);
  return r.rate;
}

DegradationRatios degradation_ratios(const NetworkScenario& s) {
  s.validate();
  const TrainingStats ts = training_stats(s);
  RateBreakdown one, fr;
  cf_core_onebit(s.beta, ts, s.M, s.K, s.Pt, s.sigma2, one);
  cf_core_fr(s.beta, ts, s.M, s.K, s.Pt, s.sigma2, fr);
  DegradationRatios d;
  const double c = s.load_ratio();
  d.tn.set_size(s.L, s.K);
  d.tn.fill(kPi * kPi * s.M / (4.0 * s.K * (c - 1.0)));
  d.cu.set_size(s.L, s.K);
  for (int j = 0; j < s.L; ++j)
    for (int k = 0; k < s.K; ++k) {
      const double b = s.beta(j, j, k);
      const double tf = ts.t_fr(j, k);
      d.cu(j, k) = (kPi / 2.0) * (b - (2.0 / kPi) * tf) / (b - tf);
    }
  d.iui = one.iui / fr.iui;
  d.pc.ones(s.L, s.K);  // pilot contamination is unaffected by quantization
  return d;
}

// ---- Monte-Carlo engine -----------------------------------------------------

namespace {

// Everything one trial contributes, P_t-free. Reduced serially in trial order.
struct TrialMoments {
  arma::cx_mat e1, ef;    // (L,K)
  arma::mat p1, pf;       // (L,K)
  arma::cube iui1, iuif;  // (l source, j victim, k)
  arma::cube qn1;         // (l source, j victim, k)
};

TrialMoments run_trial(const NetworkScenario& s, const TrainingStats& ts,
                       const McOptions& opt, const RngStream& rng, long t) {
  const int L = s.L, K = s.K, D = opt.symbol_draws;
  const ChannelRealization ch = draw_channels(s, rng, static_cast<uint64_t>(t));
  const PilotObservations obs =
      pilot_observations(s, ch, rng, static_cast<uint64_t>(t));
  const ChannelEstimates est1 = estimate_onebit(s, ts, obs);
  const ChannelEstimates estf = estimate_fr(s, ts, obs);

  std::vector<arma::cx_mat> W1(static_cast<size_t>(L)), Wf(static_cast<size_t>(L));
  std::vector<arma::cx_vec> a1(static_cast<size_t>(L));
  for (int l = 0; l < L; ++l) {
    const auto li = static_cast<size_t>(l);
    W1[li] = zf_precoder(est1.Hhat[li]);
    Wf[li] = zf_precoder(estf.Hhat[li]);
    arma::vec g;
    if (opt.gain_model == GainModel::kExactDiag)
      g = exact_transmit_gain(W1[li]);
    else
      g = arma::vec(static_cast<arma::uword>(s.M),
                    arma::fill::value(statistical_transmit_gain(s, ts, l)));
    a1[li] = arma::conv_to<arma::cx_vec>::from(g);
  }

  TrialMoments tm;
  tm.e1.zeros(L, K);
  tm.ef.zeros(L, K);
  tm.p1.zeros(L, K);
  tm.pf.zeros(L, K);
  tm.iui1.zeros(L, L, K);
  tm.iuif.zeros(L, L, K);
  tm.qn1.zeros(L, L, K);

  for (int l = 0; l < L; ++l) {
    const auto li = static_cast<size_t>(l);
    // Quantization-noise sample for BS l: one block of D symbol vectors.
    auto g = rng.engine(Stream::kSymbols,
                        {static_cast<uint64_t>(t), static_cast<uint64_t>(l)});
    arma::cx_mat S(static_cast<arma::uword>(K), static_cast<arma::uword>(D));
    for (arma::uword col = 0; col < S.n_cols; ++col)
      for (arma::uword row = 0; row < S.n_rows; ++row)
        S(row, col) = complex_gaussian(g);
    arma::cx_mat X = W1[li] * S;
    arma::cx_mat Qn = quantize(X);
    X.each_col() %= a1[li];
    Qn -= X;  // q = Q(Ws) - diag(a) W s

    for (int j = 0; j < L; ++j) {
      const arma::cx_mat& Hlj = ch.at(l, j);  // BS l -> users of cell j
      // Effective linear gains P(k, m) = h_ljk^H diag(a_l) w_lm; the gain is
      // real so scaling columns of H before the conjugate transpose is exact.
      arma::cx_mat Ha = Hlj;
      Ha.each_col() %= a1[li];
      const arma::cx_mat P1 = Ha.t() * W1[li];
      const arma::cx_mat Pf = Hlj.t() * Wf[li];
      const arma::mat P1a = arma::square(arma::abs(P1));
      const arma::mat Pfa = arma::square(arma::abs(Pf));
      const arma::cx_mat G = Hlj.t() * Qn;  // K x D noise projections
      const arma::vec qmean = arma::sum(arma::square(arma::abs(G)), 1) / D;
      for (int k = 0; k < K; ++k) {
        double s1 = arma::accu(P1a.row(static_cast<arma::uword>(k)));
        double sf = arma::accu(Pfa.row(static_cast<arma::uword>(k)));
        if (l == j) {
          tm.e1(j, k) += P1(k, k);
          tm.ef(j, k) += Pf(k, k);
          tm.p1(j, k) += P1a(k, k);
          tm.pf(j, k) += Pfa(k, k);
          s1 -= P1a(k, k);
          sf -= Pfa(k, k);
        }
        tm.iui1(l, j, k) += s1;
        tm.iuif(l, j, k) += sf;
        tm.qn1(l, j, k) += qmean(static_cast<arma::uword>(k));
      }
    }
  }
  return tm;
}

}  // namespace

McMoments mc_accumulate(const NetworkScenario& s, const McOptions& opt,
                        const RngStream& rng) {
  s.validate();
  if (opt.trials < 1)
    throw std::invalid_argument("mc: trials must be >= 1");
  if (opt.symbol_draws < 1)
    throw std::invalid_argument("mc: symbol_draws must be >= 1");
  openblas_set_num_threads(1);

  const TrainingStats ts = training_stats(s);
  const int L = s.L, K = s.K;
  const int NB =
      static_cast<int>(std::min<long>(std::max(1, opt.batches), opt.trials));

  McMoments m;
  m.L = L;
  m.K = K;
  m.trials = opt.trials;
  m.symbol_draws = opt.symbol_draws;
  m.gain_model = opt.gain_model;
  m.batch_trials.assign(static_cast<size_t>(NB), 0);
  m.e_one.assign(static_cast<size_t>(NB), arma::cx_mat(L, K, arma::fill::zeros));
  m.e_fr = m.e_one;
  m.p_one.assign(static_cast<size_t>(NB), arma::mat(L, K, arma::fill::zeros));
  m.p_fr = m.p_one;
  m.iui_one.assign(static_cast<size_t>(NB),
                   arma::cube(L, L, K, arma::fill::zeros));
  m.iui_fr = m.iui_one;
  m.qn_one = m.iui_one;

  // Per-trial moments land in slots; the reduction below runs serially in
  // trial order, so any thread count produces bit-identical results.
  std::vector<TrialMoments> slots(static_cast<size_t>(opt.trials));
  const int nthreads = std::max(1, opt.threads);
  if (nthreads == 1) {
    for (long t = 0; t < opt.trials; ++t)
      slots[static_cast<size_t>(t)] = run_trial(s, ts, opt, rng, t);
  } else {
    std::atomic<long> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr eptr;
    std::mutex mu;
    auto worker = [&] {
      for (;;) {
        if (failed.load()) return;
        const long t = next.fetch_add(1);
        if (t >= opt.trials) return;
        try {
          slots[static_cast<size_t>(t)] = run_trial(s, ts, opt, rng, t);
        } catch (...) {
          std::lock_guard<std::mutex> lk(mu);
          if (!eptr) eptr = std::current_exception();
          failed.store(true);
          return;
        }
      }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(nthreads));
    for (int i = 0; i < nthreads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (eptr) std::rethrow_exception(eptr);
  }

  for (long t = 0; t < opt.trials; ++t) {
    const auto b = static_cast<size_t>(t * NB / opt.trials);
    const auto& tm = slots[static_cast<size_t>(t)];
    m.batch_trials[b]++;
    m.e_one[b] += tm.e1;
    m.e_fr[b] += tm.ef;
    m.p_one[b] += tm.p1;
    m.p_fr[b] += tm.pf;
    m.iui_one[b] += tm.iui1;
    m.iui_fr[b] += tm.iuif;
    m.qn_one[b] += tm.qn1;
  }
  return m;
}

RateBreakdown mc_assemble(const NetworkScenario& s, const McMoments& m,
                          RateMode mode) {
  if (mode != RateMode::kMcOneBit && mode != RateMode::kMcFullRes)
    throw std::invalid_argument("mc_assemble: mode must be a Monte-Carlo mode");
  const bool onebit = (mode == RateMode::kMcOneBit);
  const int L = m.L, K = m.K;
  const TrainingStats ts = training_stats(s);
  arma::vec eta(static_cast<arma::uword>(L));
  if (onebit)
    eta.fill(eta_onebit(s));
  else
    eta = eta_fr(s, ts);

  // Turn moment sums over n trials into a rate matrix; optionally record the
  // full SQINR breakdown (used for the all-batches aggregate only).
  auto rates_from = [&](const arma::cx_mat& E, const arma::mat& P,
                        const arma::cube& IUI, const arma::cube& QN, double n,
                        RateBreakdown* rb) {
    arma::mat rate(L, K);
    for (int j = 0; j < L; ++j)
      for (int k = 0; k < K; ++k) {
        const std::complex<double> e = E(j, k) / n;
        const double p = P(j, k) / n;
        const double ds = eta(static_cast<arma::uword>(j)) * std::norm(e);
        const double cu = eta(static_cast<arma::uword>(j)) *
                          std::max(p - std::norm(e), 0.0);
        double iui = 0.0, qn = 0.0;
        for (int l = 0; l < L; ++l) {
          iui += eta(static_cast<arma::uword>(l)) * IUI(l, j, k) / n;
          if (onebit) qn += eta(static_cast<arma::uword>(l)) * QN(l, j, k) / n;
        }
        const double gamma = ds / (cu + qn + iui + s.sigma2);
        rate(j, k) = std::log2(1.0 + gamma);
        if (rb) {
          rb->ds(j, k) = ds;
          rb->cu(j, k) = cu / ds;
          rb->qn(j, k) = qn / ds;
          rb->iui(j, k) = iui / ds;
          rb->tn(j, k) = s.sigma2 / ds;
          rb->gamma(j, k) = gamma;
        }
      }
    return rate;
  };

  RateBreakdown r;
  r.mode = mode;
  size_breakdown(r, L, K);

  arma::cx_mat E(L, K, arma::fill::zeros);
  arma::mat P(L, K, arma::fill::zeros);
  arma::cube IUI(L, L, K, arma::fill::zeros), QN(L, L, K, arma::fill::zeros);
  long n = 0;
  const auto NB = m.batch_trials.size();
  for (size_t b = 0; b < NB; ++b) {
    E += onebit ? m.e_one[b] : m.e_fr[b];
    P += onebit ? m.p_one[b] : m.p_fr[b];
    IUI += onebit ? m.iui_one[b] : m.iui_fr[b];
    if (onebit) QN += m.qn_one[b];
    n += m.batch_trials[b];
  }
  r.rate = rates_from(E, P, IUI, QN, static_cast<double>(n), &r);
  r.sum_rate = arma::accu(r.rate);
  r.sum_rate_per_user = r.sum_rate / (L * K);

  // Batch-means standard errors over the per-batch rate estimates.
  std::vector<arma::mat> batch_rates;
  for (size_t b = 0; b < NB; ++b) {
    if (m.batch_trials[b] == 0) continue;
    batch_rates.push_back(rates_from(
        onebit ? m.e_one[b] : m.e_fr[b], onebit ? m.p_one[b] : m.p_fr[b],
        onebit ? m.iui_one[b] : m.iui_fr[b], m.qn_one[b],
        static_cast<double>(m.batch_trials[b]), nullptr));
  }
  const auto nb = batch_rates.size();
  if (nb >= 2) {
    arma::mat mean(L, K, arma::fill::zeros);
    for (const auto& br : batch_rates) mean += br;
    mean /= static_cast<double>(nb);
    arma::mat var(L, K, arma::fill::zeros);
    double user_mean = 0.0, user_var = 0.0;
    for (const auto& br : batch_rates) {
      var += arma::square(br - mean);
      user_mean += arma::accu(br) / (L * K);
    }
    user_mean /= static_cast<double>(nb);
    for (const auto& br : batch_rates) {
      const double d = arma::accu(br) / (L * K) - user_mean;
      user_var += d * d;
    }
    var /= static_cast<double>(nb - 1);
    user_var /= static_cast<double>(nb - 1);
    r.rate_se = arma::sqrt(var / static_cast<double>(nb));
    r.sum_rate_per_user_se = std::sqrt(user_var / static_cast<double>(nb));
  } else {
    r.rate_se.fill(arma::datum::inf);
    r.sum_rate_per_user_se = arma::datum::inf;
  }
  return r;
}

RateBreakdown mc_rate_breakdown(const NetworkScenario& s, long trials,
                                int symbol_draws, RateMode mode,
                                const RngStream& rng, GainModel gain_model,
                                int threads) {
  McOptions opt;
  opt.trials = trials;
  opt.symbol_draws = symbol_draws;
  opt.gain_model = gain_model;
  opt.threads = threads;
  const McMoments m = mc_accumulate(s, opt, rng);
  return mc_assemble(s, m, mode);
}

}  // namespace obmimo
