#pragma once

#include <array>
#include <cstdint>

namespace aoilab {

using Features = std::array<double, 2>;
using ActionVec = std::array<double, 2>;

/// Minimal episodic contract the PPO trainer drives: 2-dim features in,
/// 2-dim action in [0,1]^2 out.
class PolicyEnv {
 public:
  struct Transition {
    Features features{};
    double reward = 0.0;
    bool done = false;
  };

  virtual ~PolicyEnv() = default;
  virtual Features reset(std::uint64_t seed) = 0;
  virtual Transition step(const ActionVec& action) = 0;
};

}  // namespace aoilab
