// Rayleigh block-fading channel draws.
#pragma once

#include <armadillo>
#include <vector>

#include "obmimo/rng.hpp"
#include "obmimo/scenario.hpp"

namespace obmimo {

// One draw of all composite channels. at(l, j) is the M x K matrix of
// channels from BS l to the K users of cell j; column k has variance
// beta(l, j, k) per antenna.
struct ChannelRealization {
  int L = 0, M = 0, K = 0;
  std::vector<arma::cx_mat> H;  // L*L matrices, index l*L + j

  arma::cx_mat& at(int l, int j) { return H[static_cast<size_t>(l) * L + j]; }
  const arma::cx_mat& at(int l, int j) const {
    return H[static_cast<size_t>(l) * L + j];
  }
};

// Pure function of (scenario, rng, trial); every (l, j) block has its own
// substream so parallel trials reproduce serial results.
ChannelRealization draw_channels(const NetworkScenario& s, const RngStream& rng,
                                 std::uint64_t trial);

}  // namespace obmimo
