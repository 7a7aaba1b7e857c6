#pragma once

#include <cstdint>
#include <random>

namespace tangle {

// splitmix64 finalizer. Decorrelates nearby seed values before they reach
// the engine, so replica streams derived from base_seed ^ replica do not
// share low-bit structure.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Seedable uniform stream on top of std::mt19937_64. The engine and the
// 53-bit mapping below are pinned by the standard, so a given seed produces
// the same sequence on every platform. std::uniform_real_distribution is
// implementation-defined and is deliberately not used.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : engine_(seed) {}

  // Stream for substream `id` of a run seeded with `base_seed`:
  // mt19937_64(mix64(base_seed ^ id)). Replica r of a sweep uses id = r
  // (combined with the lambda index in multi-lambda sweeps).
  static std::uint64_t derive_seed(std::uint64_t base_seed, std::uint64_t id) {
    return mix64(base_seed ^ id);
  }
  static RngStream substream(std::uint64_t base_seed, std::uint64_t id) {
    return RngStream(derive_seed(base_seed, id));
  }

  std::uint64_t next_u64() { return engine_(); }

  // Uniform double in [0,1) from the top 53 bits.
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace tangle
