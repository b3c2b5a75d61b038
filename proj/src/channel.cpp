#include "obmimo/channel.hpp"

#include <cmath>

namespace obmimo {

ChannelRealization draw_channels(const NetworkScenario& s, const RngStream& rng,
                                 std::uint64_t trial) {
  ChannelRealization ch;
  ch.L = s.L;
  ch.M = s.M;
  ch.K = s.K;
  ch.H.resize(static_cast<size_t>(s.L) * s.L);
  for (int l = 0; l < s.L; ++l) {
    for (int j = 0; j < s.L; ++j) {
      auto eng = rng.engine(Stream::kChannel,
                            {trial, static_cast<std::uint64_t>(l),
                             static_cast<std::uint64_t>(j)});
      arma::cx_mat& H = ch.at(l, j);
      H.set_size(s.M, s.K);
      for (int k = 0; k < s.K; ++k) {
        const double scale = std::sqrt(s.beta(l, j, k));
        std::complex<double>* col = H.colptr(k);
        for (int i = 0; i < s.M; ++i) col[i] = scale * complex_gaussian(eng);
      }
    }
  }
  return ch;
}

}  // namespace obmimo
