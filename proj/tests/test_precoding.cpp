#include <doctest.h>

#include "obmimo/estimation.hpp"
#include "obmimo/precoding.hpp"
#include "obmimo/rng.hpp"

using namespace obmimo;

namespace {
constexpr double kPi = 3.14159265358979323846;

NetworkScenario small_scenario(int M = 64) {
  const double sigma2 = 1e-11;
  return make_scenario(4, M, 8, 10.0, sigma2, 1.0 / sigma2,
                       default_geometry(4));
}

arma::cx_mat random_tall(int M, int K, std::uint64_t key) {
  auto g = RngStream(key).engine(Stream::kOracle, {1});
  arma::cx_mat H(static_cast<arma::uword>(M), static_cast<arma::uword>(K));
  for (arma::uword c = 0; c < H.n_cols; ++c)
    for (arma::uword r = 0; r < H.n_rows; ++r) H(r, c) = complex_gaussian(g);
  return H;
}
}  // namespace

TEST_SUITE("precoding") {

TEST_CASE("zero-forcing identity Hhat^H W = I") {
  const arma::cx_mat H = random_tall(64, 8, 21);
  const arma::cx_mat W = zf_precoder(H);
  const arma::cx_mat I = arma::eye<arma::cx_mat>(8, 8);
  CHECK(arma::abs(H.t() * W - I).max() < 1e-10);
}

TEST_CASE("near-singular estimates fall back to the pseudo-inverse") {
  arma::cx_mat H = random_tall(16, 4, 22);
  H.col(3) = H.col(2) * (1.0 + 1e-13);  // Gram numerically singular
  arma::cx_mat W;
  CHECK_NOTHROW(W = zf_precoder(H));
  CHECK(W.is_finite());
}

TEST_CASE("deterministic-equivalent transmit gain formula") {
  const NetworkScenario s = small_scenario();
  const TrainingStats ts = training_stats(s);
  const double c = s.load_ratio();
  for (int j = 0; j < s.L; ++j) {
    const double expected =
        std::sqrt(2.0 * s.K * (c - 1.0) * (c - 1.0) / (kPi * ts.zeta_one(j)));
    CHECK(statistical_transmit_gain(s, ts, j) ==
          doctest::Approx(expected).epsilon(1e-14));
  }
}

TEST_CASE("exact transmit gain is sqrt(2/pi) over the per-antenna amplitude") {
  // Rows of W with known power: gain_i = sqrt(2/pi)/sqrt((W W^H)_ii).
  arma::cx_mat W(3, 2, arma::fill::zeros);
  W(0, 0) = 2.0;                          // row power 4
  W(1, 0) = std::complex<double>(0, 1);   // row power 2
  W(1, 1) = 1.0;
  W(2, 1) = 0.5;                          // row power 0.25
  const arma::vec a = exact_transmit_gain(W);
  CHECK(a(0) == doctest::Approx(std::sqrt(2.0 / kPi) / 2.0));
  CHECK(a(1) == doctest::Approx(std::sqrt(2.0 / kPi) / std::sqrt(2.0)));
  CHECK(a(2) == doctest::Approx(2.0 * std::sqrt(2.0 / kPi)));
  // Scaling W leaves the quantizer output unchanged; the gain compensates.
  const arma::vec a2 = exact_transmit_gain(2.0 * W);
  CHECK(arma::abs(a2 - 0.5 * a).max() < 1e-15);
  // A dead antenna (zero row) has no Bussgang gain.
  arma::cx_mat Wz(2, 1, arma::fill::zeros);
  Wz(0, 0) = 1.0;
  CHECK_THROWS_AS(exact_transmit_gain(Wz), std::invalid_argument);
}

TEST_CASE("power normalizations") {
  const NetworkScenario s = small_scenario();
  const TrainingStats ts = training_stats(s);
  CHECK(eta_onebit(s) == doctest::Approx(s.Pt / s.M).epsilon(1e-14));
  const arma::vec eta = eta_fr(s, ts);
  for (int j = 0; j < s.L; ++j)
    CHECK(eta(j) == doctest::Approx(s.Pt * (s.M - s.K) /
                                    (s.K * ts.zeta_fr(j))).epsilon(1e-14));
}

TEST_CASE("full-resolution precoder power matches the Wishart prediction") {
  // E tr(W W^H) = K zeta_fr / (M - K) justifies eta_fr; check by simulation.
  const NetworkScenario s = small_scenario();
  const TrainingStats ts = training_stats(s);
  const RngStream rng(23);
  const int trials = 300;
  const int j = 0;
  double tr = 0.0;
  for (int t = 0; t < trials; ++t) {
    const ChannelRealization ch = draw_channels(s, rng, static_cast<uint64_t>(t));
    const PilotObservations obs =
        pilot_observations(s, ch, rng, static_cast<uint64_t>(t));
    const ChannelEstimates est = estimate_fr(s, ts, obs);
    const arma::cx_mat W = zf_precoder(est.Hhat[j]);
    tr += arma::accu(arma::square(arma::abs(W)));
  }
  tr /= trials;
  const double expected = s.K * ts.zeta_fr(j) / (s.M - s.K);
  CHECK(tr == doctest::Approx(expected).epsilon(0.05));
}

TEST_CASE("quantized transmit frame") {
  const arma::cx_mat W = random_tall(32, 4, 24);
  auto g = RngStream(25).engine(Stream::kOracle, {2});
  arma::cx_mat S(4, 10);
  for (arma::uword c = 0; c < S.n_cols; ++c)
    for (arma::uword r = 0; r < S.n_rows; ++r) S(r, c) = complex_gaussian(g);
  const arma::vec a = exact_transmit_gain(W);
  const TransmitFrame f = quantized_transmit(W, S, a, 0.25);
  CHECK(f.eta == 0.25);
  // ||x_tilde||^2 = M exactly for every symbol vector (unit-modulus alphabet).
  const arma::rowvec pw = arma::sum(arma::square(arma::abs(f.x_tilde)), 0);
  CHECK(arma::abs(pw - 32.0).max() == 0.0);
  // Decomposition consistency: x_tilde = diag(a) x + q.
  arma::cx_mat rec = f.x;
  rec.each_col() %= arma::conv_to<arma::cx_vec>::from(a);
  CHECK(arma::abs(f.x_tilde - (rec + f.q)).max() < 1e-15);
}

}  // TEST_SUITE
