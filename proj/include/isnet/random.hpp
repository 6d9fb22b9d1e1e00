#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace isnet {

/// Name recorded in scenario files and outputs. Bump the suffix whenever the
/// stream derivation or the bits-to-double mapping changes.
inline constexpr std::string_view kGeneratorName = "mt19937_64+splitmix64/v1";

/// SplitMix64 finalizer (Steele, Lea, Flood 2014).
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed of replication `run` derived from the base seed:
/// splitmix64(splitmix64(seed) + run).
constexpr std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t run) {
  return splitmix64(splitmix64(seed) + run);
}

/// Uniform stream over [0, 1). Both the engine output and the conversion
/// to double are fixed by the standard, so draws are identical across
/// platforms (std::uniform_real_distribution is not).
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed, std::uint64_t run = 0)
      : engine_(stream_seed(seed, run)) {}

  /// 53 random bits scaled into [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace isnet
