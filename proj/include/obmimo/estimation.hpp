// Uplink training and MMSE channel estimation, one-bit and full-resolution.
//
// All cells reuse the same orthogonal pilot book (Phi = I_K scaled), so pilot
// slot k isolates user k of every cell and estimates are pilot-contaminated.
// Both estimators consume the same pre-quantization observations, coupling the
// one-bit and full-resolution branches per trial (variance reduction when the
// two modes are compared).
#pragma once

#include <armadillo>
#include <vector>

#include "obmimo/channel.hpp"
#include "obmimo/rng.hpp"
#include "obmimo/scenario.hpp"

namespace obmimo {

// Y[j] is M x K; column k is the despread pilot observation at BS j,
//   y_jk = sqrt(rho_p*K) * sum_l h_jlk + n,   n ~ CN(0, I_M).
struct PilotObservations {
  std::vector<arma::cx_mat> Y;
};

PilotObservations pilot_observations(const NetworkScenario& s,
                                     const ChannelRealization& ch,
                                     const RngStream& rng, std::uint64_t trial);

// Hhat[j] is M x K, column k the estimate of BS j's own user k channel.
struct ChannelEstimates {
  std::vector<arma::cx_mat> Hhat;
};

// One-bit MMSE estimate: hhat = sqrt(rho_p*K) * beta_jjk * abar_jk * Q(y_jk).
// Per-antenna estimate variance is t_one (TrainingStats).
ChannelEstimates estimate_onebit(const NetworkScenario& s,
                                 const TrainingStats& ts,
                                 const PilotObservations& obs);

// Full-resolution MMSE estimate:
//   hhat = sqrt(rho_p*K) * beta_jjk * y_jk / (sum_l K*rho_p*beta_jlk + 1),
// with per-antenna variance t_fr = (pi/2) * t_one.
ChannelEstimates estimate_fr(const NetworkScenario& s, const TrainingStats& ts,
                             const PilotObservations& obs);

}  // namespace obmimo
