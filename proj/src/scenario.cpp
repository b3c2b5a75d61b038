#include "obmimo/scenario.hpp"

#include <cmath>
#include <stdexcept>

namespace obmimo {

void NetworkScenario::validate() const {
  if (L < 1) throw std::invalid_argument("scenario: L must be >= 1");
  if (K < 1) throw std::invalid_argument("scenario: K must be >= 1");
  if (M <= K) throw std::invalid_argument("scenario: M must exceed K (zero-forcing needs M > K)");
  if (Pt <= 0 || sigma2 <= 0 || rho_p <= 0)
    throw std::invalid_argument("scenario: powers must be positive");
  if (beta.n_rows != static_cast<arma::uword>(L) ||
      beta.n_cols != static_cast<arma::uword>(L) ||
      beta.n_slices != static_cast<arma::uword>(K))
    throw std::invalid_argument("scenario: beta must be L x L x K");
  if (beta.min() <= 0.0)
    throw std::invalid_argument("scenario: beta entries must be positive");
}

TrainingStats training_stats_core(const arma::cube& beta, double rho_p,
                                  int K) {
  const double pi = 3.14159265358979323846;
  const int L = static_cast<int>(beta.n_rows);
  TrainingStats ts;
  ts.abar.set_size(L, K);
  ts.t_one.set_size(L, K);
  ts.t_fr.set_size(L, K);
  ts.zeta_one.set_size(L);
  ts.zeta_fr.set_size(L);
  ts.zeta_bar.set_size(L);
  for (int j = 0; j < L; ++j) {
    double inv_t_one = 0, inv_t_fr = 0, inv_c = 0;
    for (int k = 0; k < K; ++k) {
      double den = 1.0;
      for (int l = 0; l < L; ++l) den += K * rho_p * beta(j, l, k);
      const double b = beta(j, j, k);
      ts.abar(j, k) = std::sqrt(2.0 / (pi * den));
      ts.t_fr(j, k) = b * b * rho_p * K / den;
      ts.t_one(j, k) = (2.0 / pi) * ts.t_fr(j, k);
      inv_t_one += 1.0 / ts.t_one(j, k);
      inv_t_fr += 1.0 / ts.t_fr(j, k);
      inv_c += den / (b * b);
    }
    ts.zeta_one(j) = inv_t_one / K;
    ts.zeta_fr(j) = inv_t_fr / K;
    ts.zeta_bar(j) = inv_c;  // sum, not mean: limit quantity uses sum_k 1/c_jjk
  }
  return ts;
}

TrainingStats training_stats(const NetworkScenario& s) {
  return training_stats_core(s.beta, s.rho_p, s.K);
}

Geometry default_geometry(int L) {
  Geometry g;
  const double d = 525.0;
  const std::array<std::array<double, 2>, 4> grid = {
      {{0, 0}, {d, 0}, {0, d}, {d, d}}};
  for (int i = 0; i < L; ++i)
    g.bs_xy.push_back(i < 4 ? grid[static_cast<size_t>(i)]
                            : std::array<double, 2>{d * (i % 2), d * (i / 2)});
  return g;
}

namespace {

arma::cube beta_from_angles(int L, int K, const Geometry& geom,
                            const arma::mat& angles /* (L,K) */) {
  arma::cube beta(L, L, K);
  for (int l = 0; l < L; ++l) {
    for (int k = 0; k < K; ++k) {
      const double ux = geom.bs_xy[static_cast<size_t>(l)][0] +
                        geom.circle_radius * std::cos(angles(l, k));
      const double uy = geom.bs_xy[static_cast<size_t>(l)][1] +
                        geom.circle_radius * std::sin(angles(l, k));
      for (int j = 0; j < L; ++j) {
        const double dx = geom.bs_xy[static_cast<size_t>(j)][0] - ux;
        const double dy = geom.bs_xy[static_cast<size_t>(j)][1] - uy;
        const double d = std::sqrt(dx * dx + dy * dy);
        if (d <= 0.0)
          throw std::invalid_argument("scenario: user coincides with a BS");
        beta(j, l, k) =
            geom.pathloss_const / std::pow(d, geom.pathloss_exponent);
      }
    }
  }
  return beta;
}

NetworkScenario assemble(int L, int M, int K, double Pt, double sigma2,
                         double rho_p, arma::cube beta) {
  NetworkScenario s;
  s.L = L;
  s.M = M;
  s.K = K;
  s.Pt = Pt;
  s.sigma2 = sigma2;
  s.rho_p = rho_p;
  s.beta = std::move(beta);
  s.validate();
  return s;
}

}  // namespace

NetworkScenario make_scenario(int L, int M, int K, double Pt, double sigma2,
                              double rho_p, const Geometry& geom,
                              double offset) {
  const double two_pi = 6.28318530717958647692;
  if (static_cast<int>(geom.bs_xy.size()) < L)
    throw std::invalid_argument("scenario: need one BS position per cell");
  arma::mat angles(L, K);
  for (int l = 0; l < L; ++l)
    for (int k = 0; k < K; ++k) angles(l, k) = offset + two_pi * k / K;
  return assemble(L, M, K, Pt, sigma2, rho_p,
                  beta_from_angles(L, K, geom, angles));
}

NetworkScenario make_scenario_random(int L, int M, int K, double Pt,
                                     double sigma2, double rho_p,
                                     const Geometry& geom,
                                     const RngStream& rng) {
  const double two_pi = 6.28318530717958647692;
  if (static_cast<int>(geom.bs_xy.size()) < L)
    throw std::invalid_argument("scenario: need one BS position per cell");
  arma::mat angles(L, K);
  for (int l = 0; l < L; ++l) {
    auto eng = rng.engine(Stream::kPlacement, {static_cast<std::uint64_t>(l)});
    for (int k = 0; k < K; ++k)
      angles(l, k) = two_pi * static_cast<double>(eng() >> 11) * 0x1.0p-53;
  }
  return assemble(L, M, K, Pt, sigma2, rho_p,
                  beta_from_angles(L, K, geom, angles));
}

NetworkScenario make_scenario_from_beta(int M, double Pt, double sigma2,
                                        double rho_p, const arma::cube& beta) {
  return assemble(static_cast<int>(beta.n_rows), M,
                  static_cast<int>(beta.n_slices), Pt, sigma2, rho_p, beta);
}

}  // namespace obmimo
