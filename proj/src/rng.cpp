#include "aoilab/rng.hpp"

#include <array>
#include <stdexcept>
#include <string>

namespace aoilab {
namespace {

constexpr std::array<std::string_view, 6> kNames = {"traffic",    "mobility",    "sizes",
                                                    "placement",  "policy-init", "policy-sampling"};

}  // namespace

std::string_view stream_name(Stream stream) { return kNames.at(static_cast<std::size_t>(stream)); }

Stream parse_stream(std::string_view name) {
  for (std::size_t i = 0; i < kNames.size(); ++i) {
    if (kNames[i] == name) return static_cast<Stream>(i);
  }
  throw std::invalid_argument("unknown rng stream: " + std::string(name));
}

Rng RngHub::derive(Stream stream) const {
  const auto tag = static_cast<std::uint64_t>(stream) + 1;
  const std::uint64_t a = mix64(master_seed_);
  const std::uint64_t b = mix64(a ^ (tag * 0xd1b54a32d192ed03ULL));
  std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                    static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32),
                    static_cast<std::uint32_t>(tag)};
  return Rng(seq);
}

std::uint64_t RngHub::episode_seed(std::uint64_t index) const {
  return mix64(mix64(master_seed_) + 0x632be59bd9b4e019ULL * (index + 1));
}

}  // namespace aoilab
