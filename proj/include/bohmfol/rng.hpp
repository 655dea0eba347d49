#pragma once

#include <cstdint>
#include <random>

#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_01.hpp>

namespace bohmfol::rng {

/// splitmix64 finalizer; a bijective 64-bit mixer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Seed of the substream `index` under `master`. Used both for per-trajectory
/// streams and for independent sub-runs of a protocol.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return mix64(mix64(master) ^ mix64(index + 0x632be59bd9b4e019ULL));
}

/// Independent random stream keyed by (master seed, index). The draw
/// sequence depends only on the key, never on scheduling.
class Stream {
public:
  Stream(std::uint64_t master, std::uint64_t index)
      : engine_(derive_seed(master, index)) {}

  /// Uniform on the open interval (0, 1).
  double uniform() {
    double u = 0.0;
    do {
      u = unit_(engine_);
    } while (u == 0.0);
    return u;
  }

  double normal(double mean, double sd) {
    return normal_(engine_) * sd + mean;
  }

  bool coin() { return (engine_() >> 63) != 0; }

  std::mt19937_64 &engine() { return engine_; }

private:
  std::mt19937_64 engine_;
  boost::random::uniform_01<double> unit_;
  boost::random::normal_distribution<double> normal_{0.0, 1.0};
};

} // namespace bohmfol::rng
