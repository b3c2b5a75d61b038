#include "obmimo/rng.hpp"

#include <cmath>

namespace obmimo {

std::complex<double> complex_gaussian(std::mt19937_64& g) {
  const double two_pi = 6.28318530717958647692;
  double u1 = uniform_unit(g);
  double u2 = static_cast<double>(g() >> 11) * 0x1.0p-53;
  double r = std::sqrt(-std::log(u1));
  return {r * std::cos(two_pi * u2), r * std::sin(two_pi * u2)};
}

}  // namespace obmimo
