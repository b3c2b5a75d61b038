// Multi-cell network scenario: geometry, large-scale fading and the training
// statistics that every closed-form rate expression is built from.
#pragma once

#include <armadillo>
#include <array>
#include <vector>

#include "obmimo/rng.hpp"

namespace obmimo {

struct NetworkScenario {
  int L = 4;    // cells
  int M = 128;  // BS antennas
  int K = 8;    // users per cell (= pilot length tau_p)
  double Pt = 10.0;       // downlink transmit power, watts
  double sigma2 = 1e-11;  // receiver noise power, watts
  double rho_p = 1e11;    // uplink pilot SNR, linear

  // beta(j, l, k): large-scale gain from BS j to user k of cell l.
  arma::cube beta;

  double load_ratio() const { return static_cast<double>(M) / K; }
  void validate() const;  // throws std::invalid_argument on violations
};

// Closed-form training statistics shared by estimation and the rate formulas.
// For user k of cell j, with den = sum_l K*rho_p*beta_jlk + 1:
//   abar      = sqrt(2/(pi*den))                  per-component gain of the
//                                                 quantized pilot observation
//   t_one     = 2*beta_jjk^2*rho_p*K/(pi*den)     one-bit estimate variance
//   t_fr      = beta_jjk^2*rho_p*K/den            full-resolution variance
//   zeta_one  = (1/K) sum_k 1/t_one               per-cell inverse-variance mean
//   zeta_fr   = (1/K) sum_k 1/t_fr
//   zeta_bar  = sum_k den/beta_jjk^2              pilot-SNR-free limit quantity
struct TrainingStats {
  arma::mat abar;     // (L,K)
  arma::mat t_one;    // (L,K)
  arma::mat t_fr;     // (L,K)
  arma::vec zeta_one;  // (L)
  arma::vec zeta_fr;   // (L)
  arma::vec zeta_bar;  // (L)
};

TrainingStats training_stats(const NetworkScenario& s);

// Same statistics from a bare beta cube; none of them depend on M, which lets
// the antenna-dimensioning search evaluate rate expressions at fractional M.
TrainingStats training_stats_core(const arma::cube& beta, double rho_p, int K);

// Cell layout on a square grid (default spacing 525 m), each cell's K users
// on a circle of given radius around its BS; beta = c0 / d^alpha.
struct Geometry {
  std::vector<std::array<double, 2>> bs_xy;  // one entry per cell
  double circle_radius = 250.0;
  double pathloss_exponent = 3.0;
  double pathloss_const = 1e-3;
};

Geometry default_geometry(int L);

// Users equally spaced on the circle starting at angle `offset` (radians).
NetworkScenario make_scenario(int L, int M, int K, double Pt, double sigma2,
                              double rho_p, const Geometry& geom,
                              double offset = 0.0);

// Users at uniform random angles drawn from the placement stream.
NetworkScenario make_scenario_random(int L, int M, int K, double Pt,
                                     double sigma2, double rho_p,
                                     const Geometry& geom,
                                     const RngStream& rng);

// Scenario from an explicit beta cube (j, l, k).
NetworkScenario make_scenario_from_beta(int M, double Pt, double sigma2,
                                        double rho_p, const arma::cube& beta);

}  // namespace obmimo
