#include "obmimo/quantize.hpp"

#include <cmath>
#include <stdexcept>

namespace obmimo {

arma::cx_mat quantize(const arma::cx_mat& a) {
  arma::cx_mat out(arma::size(a));
  const std::complex<double>* src = a.memptr();
  std::complex<double>* dst = out.memptr();
  for (arma::uword i = 0; i < a.n_elem; ++i) dst[i] = quantize(src[i]);
  return out;
}

arma::cx_vec quantize(const arma::cx_vec& a) {
  arma::cx_vec out(a.n_elem);
  for (arma::uword i = 0; i < a.n_elem; ++i) out(i) = quantize(a(i));
  return out;
}

arma::vec bussgang_gain_diag(const arma::vec& ryy_diag) {
  const double pi = 3.14159265358979323846;
  if (ryy_diag.min() <= 0.0)
    throw std::invalid_argument("bussgang_gain_diag: covariance diagonal must be positive");
  return std::sqrt(2.0 / pi) / arma::sqrt(ryy_diag);
}

arma::cx_mat quantization_noise_covariance(const arma::cx_mat& Ryy) {
  const double pi = 3.14159265358979323846;
  if (Ryy.n_rows != Ryy.n_cols)
    throw std::invalid_argument("quantization_noise_covariance: square matrix required");
  const arma::vec d = arma::real(Ryy.diag());
  if (d.min() <= 0.0)
    throw std::invalid_argument("quantization_noise_covariance: covariance diagonal must be positive");
  const arma::vec inv_sd = 1.0 / arma::sqrt(d);
  // B + jC: Ryy with unit-normalized diagonal.
  arma::mat B = arma::real(Ryy);
  arma::mat C = arma::imag(Ryy);
  B %= inv_sd * inv_sd.t();
  C %= inv_sd * inv_sd.t();
  // Correlation coefficients live in [-1, 1]; clamp ulp-level excursions so
  // asin stays real.
  B = arma::clamp(B, -1.0, 1.0);
  C = arma::clamp(C, -1.0, 1.0);
  arma::cx_mat Rqq(arma::asin(B) - B, arma::asin(C) - C);
  Rqq *= 2.0 / pi;
  return Rqq;
}

}  // namespace obmimo
