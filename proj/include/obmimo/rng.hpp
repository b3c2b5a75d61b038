// Deterministic keyed random streams. Every random quantity in a run is drawn
// from an engine derived from (root seed, named stream, trial, entity indices),
// so parallel Monte-Carlo trials reproduce serial results bit for bit.
#pragma once

#include <complex>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace obmimo {

// splitmix64 finalizer; full-period 64-bit mixer with good avalanche.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Named substreams. Values are part of the determinism contract: changing them
// changes every random draw of the program.
enum class Stream : std::uint64_t {
  kChannel = 1,
  kPilotNoise = 2,
  kSymbols = 3,
  kPlacement = 4,
  kOracle = 5,  // test-only sampling that must not collide with simulation streams
};

class RngStream {
 public:
  explicit RngStream(std::uint64_t root_seed) : root_(root_seed) {}

  std::uint64_t root() const { return root_; }

  // Engine for a (stream, indices...) key. std::mt19937_64 seeded from a single
  // mixed word is fully specified by the standard, hence portable.
  std::mt19937_64 engine(Stream s, std::initializer_list<std::uint64_t> key) const {
    std::uint64_t h = mix64(root_);
    h = mix64(h ^ mix64(static_cast<std::uint64_t>(s)));
    for (std::uint64_t k : key) h = mix64(h ^ mix64(k));
    return std::mt19937_64(h);
  }

 private:
  std::uint64_t root_;
};

// One uniform double in (0, 1]; 53 mantissa bits. The +1 keeps log() finite.
inline double uniform_unit(std::mt19937_64& g) {
  return static_cast<double>((g() >> 11) + 1) * 0x1.0p-53;
}

// CN(0,1) sample via polar Box-Muller: |z|^2 ~ Exp(1), phase uniform.
std::complex<double> complex_gaussian(std::mt19937_64& g);

}  // namespace obmimo
