// Zero-forcing precoding, transmit-side Bussgang gains, power normalization
// and the quantized transmit frame.
#pragma once

#include <armadillo>
#include <stdexcept>

#include "obmimo/scenario.hpp"

namespace obmimo {

struct SingularPrecoderError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// W = Hhat (Hhat^H Hhat)^{-1}; satisfies Hhat^H W = I_K. Falls back to a
// pseudo-inverse when the Gram matrix resists Cholesky inversion, and throws
// SingularPrecoderError if even that fails (degenerate estimate draw).
arma::cx_mat zf_precoder(const arma::cx_mat& Hhat);

// Deterministic-equivalent transmit Bussgang gain for cell j (scalar):
//   A_j = sqrt(2*K*(c-1)^2 / (pi*zeta_one_j)),   c = M/K.
// Valid for large (M, K) at fixed c; the per-realization diagonal gain below
// is the exact finite-size counterpart.
double statistical_transmit_gain(const NetworkScenario& s, const TrainingStats& ts,
                            int j);

// Exact per-antenna Bussgang gain of the precoded signal x = W s with
// s ~ CN(0, I): a_i = sqrt(2/pi)/sqrt((W W^H)_ii). Makes E[x q^H] = 0 and
// diag(E[q q^H]) = 1 - 2/pi hold exactly, realization by realization.
arma::vec exact_transmit_gain(const arma::cx_mat& W);

// Power normalization so that E[||sqrt(eta) x_tilde||^2] = P_t.
// One-bit: the quantized signal has ||x_tilde||^2 = M surely, so eta = P_t/M.
double eta_onebit(const NetworkScenario& s);
// Full resolution: E[tr(W W^H)] = K*zeta_fr/(M-K) under inverse-Wishart
// statistics of the ZF Gram matrix, giving eta_l = P_t(M-K)/(K*zeta_fr_l).
arma::vec eta_fr(const NetworkScenario& s, const TrainingStats& ts);

// One precoded + quantized downlink frame for a block of symbol draws.
struct TransmitFrame {
  arma::cx_mat x;        // W * S, M x draws
  arma::cx_mat x_tilde;  // Q(x)
  arma::cx_mat q;        // x_tilde - diag(gain) * x
  double eta = 0.0;
};

TransmitFrame quantized_transmit(const arma::cx_mat& W, const arma::cx_mat& S,
                                 const arma::vec& gain_diag, double eta);

}  // namespace obmimo
