#pragma once

// Independent reference computations used only by the tests.

#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

#include "aoilab/baseline.hpp"
#include "aoilab/ppo.hpp"

namespace oracle {

/// A_t = sum_{l>=0} (gamma lambda)^l delta_{t+l}, with the product of
/// (1 - done) factors cutting the sum at episode ends. Plain double loop.
inline std::vector<double> gae_double_loop(const aoilab::Trajectory& tr, double gamma,
                                           double lambda) {
  const std::size_t n = tr.size();
  std::vector<double> delta(n);
  for (std::size_t t = 0; t < n; ++t) {
    const double next_v = t + 1 < n ? tr.values[t + 1] : tr.bootstrap_value;
    delta[t] = tr.rewards[t] + gamma * next_v * (tr.dones[t] ? 0.0 : 1.0) - tr.values[t];
  }
  std::vector<double> adv(n, 0.0);
  for (std::size_t t = 0; t < n; ++t) {
    double weight = 1.0;
    for (std::size_t l = t; l < n; ++l) {
      adv[t] += weight * delta[l];
      if (tr.dones[l]) break;
      weight *= gamma * lambda;
    }
  }
  return adv;
}

/// Central finite-difference gradient of the total PPO loss.
inline std::vector<double> loss_gradient_fd(aoilab::PolicyNet net,
                                            const std::vector<aoilab::Sample>& batch,
                                            const aoilab::PPOConfig& config, double h = 1e-6) {
  std::vector<double> g(net.num_params());
  auto params = net.params();
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double orig = params[i];
    params[i] = orig + h;
    const double up = aoilab::ppo_loss(net, batch, config).total;
    params[i] = orig - h;
    const double down = aoilab::ppo_loss(net, batch, config).total;
    params[i] = orig;
    g[i] = (up - down) / (2.0 * h);
  }
  return g;
}

/// O(n^2) scan: indices of points no other point dominates.
inline std::vector<std::size_t> frontier_quadratic(const std::vector<aoilab::ObjectivePoint>& p) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < p.size(); ++i) {
    bool dominated = false;
    for (std::size_t j = 0; j < p.size() && !dominated; ++j) {
      if (j == i) continue;
      const bool no_worse = p[j].gain >= p[i].gain && p[j].cost <= p[i].cost;
      const bool better = p[j].gain > p[i].gain || p[j].cost < p[i].cost;
      dominated = no_worse && better;
    }
    if (!dominated) out.push_back(i);
  }
  return out;
}

}  // namespace oracle
