#include <doctest.h>

#include "obmimo/channel.hpp"

using namespace obmimo;

namespace {
NetworkScenario small_scenario() {
  const double sigma2 = 1e-11;
  return make_scenario(4, 64, 8, 10.0, sigma2, 1.0 / sigma2,
                       default_geometry(4));
}
}  // namespace

TEST_SUITE("channel") {

TEST_CASE("dimensions and block indexing") {
  const NetworkScenario s = small_scenario();
  const ChannelRealization ch = draw_channels(s, RngStream(1), 0);
  CHECK(ch.L == s.L);
  CHECK(ch.M == s.M);
  CHECK(ch.K == s.K);
  REQUIRE(ch.H.size() == static_cast<size_t>(s.L * s.L));
  for (int l = 0; l < s.L; ++l)
    for (int j = 0; j < s.L; ++j) {
      CHECK(ch.at(l, j).n_rows == static_cast<arma::uword>(s.M));
      CHECK(ch.at(l, j).n_cols == static_cast<arma::uword>(s.K));
    }
}

TEST_CASE("per-trial determinism and trial independence") {
  const NetworkScenario s = small_scenario();
  const RngStream rng(123);
  const ChannelRealization a = draw_channels(s, rng, 7);
  const ChannelRealization b = draw_channels(s, rng, 7);
  const ChannelRealization c = draw_channels(s, rng, 8);
  double same = 0.0, diff = 0.0;
  for (size_t i = 0; i < a.H.size(); ++i) {
    same = std::max(same, arma::abs(a.H[i] - b.H[i]).max());
    diff = std::max(diff, arma::abs(a.H[i] - c.H[i]).max());
  }
  CHECK(same == 0.0);
  CHECK(diff > 0.0);
}

TEST_CASE("per-antenna variance follows the large-scale gains") {
  const NetworkScenario s = small_scenario();
  const RngStream rng(2024);
  const int trials = 300;
  arma::cube pow(s.L, s.L, s.K, arma::fill::zeros);
  for (int t = 0; t < trials; ++t) {
    const ChannelRealization ch = draw_channels(s, rng, static_cast<uint64_t>(t));
    for (int l = 0; l < s.L; ++l)
      for (int j = 0; j < s.L; ++j) {
        const arma::vec col_pow = arma::conv_to<arma::vec>::from(
            arma::sum(arma::square(arma::abs(ch.at(l, j))), 0));
        for (int k = 0; k < s.K; ++k) pow(l, j, k) += col_pow(k) / s.M;
      }
  }
  pow /= trials;
  // Mean ||h||^2 / M pools M*trials = 19200 unit-exponential samples per
  // (l, j, k): standard error ~ beta / 139, so 5% is a > 6-sigma band.
  for (int l = 0; l < s.L; ++l)
    for (int j = 0; j < s.L; ++j)
      for (int k = 0; k < s.K; ++k)
        CHECK(pow(l, j, k) ==
              doctest::Approx(s.beta(l, j, k)).epsilon(0.05));
}

TEST_CASE("real and imaginary parts are balanced") {
  const NetworkScenario s = small_scenario();
  const ChannelRealization ch = draw_channels(s, RngStream(9), 0);
  const arma::cx_mat& H = ch.at(0, 0);
  const double pr = arma::accu(arma::square(arma::real(H)));
  const double pi_ = arma::accu(arma::square(arma::imag(H)));
  // Each carries half the power; 64*8 = 512 samples -> ~6% SE, allow 30%.
  CHECK(pr / pi_ == doctest::Approx(1.0).epsilon(0.3));
}

}  // TEST_SUITE
