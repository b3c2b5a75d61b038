#include "obmimo/estimation.hpp"

#include <cmath>

#include "obmimo/quantize.hpp"

namespace obmimo {

PilotObservations pilot_observations(const NetworkScenario& s,
                                     const ChannelRealization& ch,
                                     const RngStream& rng,
                                     std::uint64_t trial) {
  PilotObservations obs;
  obs.Y.resize(static_cast<size_t>(s.L));
  const double amp = std::sqrt(s.rho_p * s.K);
  for (int j = 0; j < s.L; ++j) {
    arma::cx_mat Y(s.M, s.K, arma::fill::zeros);
    for (int l = 0; l < s.L; ++l) Y += ch.at(j, l);  // same pilots everywhere
    Y *= amp;
    auto eng = rng.engine(Stream::kPilotNoise,
                          {trial, static_cast<std::uint64_t>(j)});
    std::complex<double>* p = Y.memptr();
    for (arma::uword i = 0; i < Y.n_elem; ++i) p[i] += complex_gaussian(eng);
    obs.Y[static_cast<size_t>(j)] = std::move(Y);
  }
  return obs;
}

ChannelEstimates estimate_onebit(const NetworkScenario& s,
                                 const TrainingStats& ts,
                                 const PilotObservations& obs) {
  ChannelEstimates est;
  est.Hhat.resize(static_cast<size_t>(s.L));
  const double amp = std::sqrt(s.rho_p * s.K);
  for (int j = 0; j < s.L; ++j) {
    arma::cx_mat Hhat = quantize(obs.Y[static_cast<size_t>(j)]);
    for (int k = 0; k < s.K; ++k)
      Hhat.col(k) *= amp * s.beta(j, j, k) * ts.abar(j, k);
    est.Hhat[static_cast<size_t>(j)] = std::move(Hhat);
  }
  return est;
}

ChannelEstimates estimate_fr(const NetworkScenario& s, const TrainingStats& ts,
                             const PilotObservations& obs) {
  ChannelEstimates est;
  est.Hhat.resize(static_cast<size_t>(s.L));
  const double amp = std::sqrt(s.rho_p * s.K);
  for (int j = 0; j < s.L; ++j) {
    arma::cx_mat Hhat = obs.Y[static_cast<size_t>(j)];
    for (int k = 0; k < s.K; ++k) {
      // MMSE scaling: beta/(sum_l K rho_p beta + 1); the denominator is
      // recoverable from the stats as beta^2 rho_p K / t_fr.
      const double b = s.beta(j, j, k);
      const double den = b * b * s.rho_p * s.K / ts.t_fr(j, k);
      Hhat.col(k) *= amp * b / den;
    }
    est.Hhat[static_cast<size_t>(j)] = std::move(Hhat);
  }
  return est;
}

}  // namespace obmimo
