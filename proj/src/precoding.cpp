#include "obmimo/precoding.hpp"

#include <cmath>

#include "obmimo/quantize.hpp"

namespace obmimo {

arma::cx_mat zf_precoder(const arma::cx_mat& Hhat) {
  const arma::cx_mat gram = Hhat.t() * Hhat;
  arma::cx_mat inv;
  // inv_sympd can reject marginally conditioned Gram matrices; fall back to
  // the pseudo-inverse before declaring the draw degenerate.
  if (!arma::inv_sympd(inv, gram)) {
    if (!arma::pinv(inv, gram))
      throw SingularPrecoderError("zf_precoder: singular estimate Gram matrix");
  }
  return Hhat * inv;
}

double statistical_transmit_gain(const NetworkScenario& s, const TrainingStats& ts,
                            int j) {
  const double pi = 3.14159265358979323846;
  const double c = s.load_ratio();
  return std::sqrt(2.0 * s.K * (c - 1.0) * (c - 1.0) /
                   (pi * ts.zeta_one(static_cast<arma::uword>(j))));
}

arma::vec exact_transmit_gain(const arma::cx_mat& W) {
  // diag(W W^H) without forming the Gram matrix: squared row norms.
  const arma::vec row_power = arma::sum(arma::square(arma::abs(W)), 1);
  return bussgang_gain_diag(row_power);
}

double eta_onebit(const NetworkScenario& s) { return s.Pt / s.M; }

arma::vec eta_fr(const NetworkScenario& s, const TrainingStats& ts) {
  return s.Pt * (s.M - s.K) / (s.K * ts.zeta_fr);
}

TransmitFrame quantized_transmit(const arma::cx_mat& W, const arma::cx_mat& S,
                                 const arma::vec& gain_diag, double eta) {
  TransmitFrame f;
  f.eta = eta;
  f.x = W * S;
  f.x_tilde = quantize(f.x);
  arma::cx_mat ax = f.x;
  ax.each_col() %= arma::conv_to<arma::cx_vec>::from(gain_diag);
  f.q = f.x_tilde - ax;
  return f;
}

}  // namespace obmimo
