// One-bit quantization and its Bussgang second-moment toolbox.
#pragma once

#include <armadillo>

namespace obmimo {

// Q(a) = (sign(Re a) + j*sign(Im a))/sqrt(2), with sign(0) := +1.
// Output alphabet is (1/sqrt(2)){±1 ± j}; every sample has unit modulus.
inline std::complex<double> quantize(std::complex<double> a) {
  const double inv_sqrt2 = 0.70710678118654752440;
  return {a.real() >= 0.0 ? inv_sqrt2 : -inv_sqrt2,
          a.imag() >= 0.0 ? inv_sqrt2 : -inv_sqrt2};
}

arma::cx_mat quantize(const arma::cx_mat& a);
arma::cx_vec quantize(const arma::cx_vec& a);

// Per-component Bussgang gain for a zero-mean complex Gaussian input with
// covariance diagonal ryy_diag: a_i = sqrt(2/pi) / sqrt(ryy_ii). With this
// diagonal gain, q = Q(y) - A y satisfies E[y q^H] = 0 exactly.
arma::vec bussgang_gain_diag(const arma::vec& ryy_diag);

// Arcsin law: covariance of the quantization noise q = Q(y) - A y for
// Gaussian y with covariance Ryy and the diagonal Bussgang gain above.
//   R_qq = (2/pi)(arcsin(B) + j*arcsin(C)) - (2/pi)(B + j C)
// where B, C are the real/imaginary parts of Ryy normalized by its diagonal.
arma::cx_mat quantization_noise_covariance(const arma::cx_mat& Ryy);

}  // namespace obmimo
