#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace aoilab {

/// Engine used for every stochastic draw in the library.
using Rng = std::mt19937_64;

/// Declared substream labels. Each label maps to an independent engine
/// derived from the master seed.
enum class Stream { kTraffic, kMobility, kSizes, kPlacement, kPolicyInit, kPolicySampling };

std::string_view stream_name(Stream stream);

/// Throws std::invalid_argument for labels that are not declared.
Stream parse_stream(std::string_view name);

/// SplitMix64 finalizer; used to spread seeds before seeding engines.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

class RngHub {
 public:
  explicit RngHub(std::uint64_t master_seed) : master_seed_(master_seed) {}

  std::uint64_t master_seed() const { return master_seed_; }

  /// Same (master_seed, stream) always yields the same engine state.
  Rng derive(Stream stream) const;
  Rng derive(std::string_view name) const { return derive(parse_stream(name)); }

  /// Seed of the i-th evaluation episode; shared by every caller that asks
  /// for the same index so compared configurations see the same traffic.
  std::uint64_t episode_seed(std::uint64_t index) const;

 private:
  std::uint64_t master_seed_;
};

}  // namespace aoilab
