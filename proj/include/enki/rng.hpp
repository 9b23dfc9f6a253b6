#pragma once

#include <cstdint>
#include <random>

namespace enki {

/// Deterministic seed derivation for independent substreams (splitmix64 mix).
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Seeded random stream. Substreams are derived from the base seed so that
/// consumers do not depend on draw interleaving elsewhere.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : base_seed_(seed), engine_(seed) {}

  RngStream substream(std::uint64_t id) const {
    return RngStream(derive_seed(base_seed_, id));
  }

  double normal() { return normal_(engine_); }
  double uniform01() { return uniform_(engine_); }

 private:
  std::uint64_t base_seed_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

}  // namespace enki
