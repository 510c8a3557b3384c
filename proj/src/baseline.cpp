#include "aoilab/baseline.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace aoilab {

EpisodeMetrics run_episode(SubMetaverseEnv& env, std::uint64_t seed, const ActionPolicy& policy) {
  EpisodeMetrics m;
  m.seed = seed;
  Observation obs = env.reset(seed);
  while (!env.done()) {
    const auto out = env.step(policy(obs));
    m.episode_return += out.reward;
    obs = out.observation;
  }
  m.generated_ue_mbit = env.generated_ue_mbit();
  m.summary = throughput_summary(env.ledger(), env.config(), env.time());
  return m;
}

std::vector<std::uint64_t> evaluation_seeds(std::uint64_t master_seed, int episodes) {
  const RngHub hub(master_seed);
  std::vector<std::uint64_t> seeds(static_cast<std::size_t>(std::max(episodes, 0)));
  for (std::size_t i = 0; i < seeds.size(); ++i) seeds[i] = hub.episode_seed(i);
  return seeds;
}

SplitResult aggregate(double comm_split, double comp_split,
                      std::span<const EpisodeMetrics> episodes) {
  SplitResult r;
  r.comm_split = comm_split;
  r.comp_split = comp_split;
  r.episodes = static_cast<int>(episodes.size());
  std::vector<double> aosi, aori;
  std::size_t completed = 0, flagged = 0;
  for (const auto& e : episodes) {
    if (e.summary.aosi) aosi.push_back(e.summary.aosi->mean);
    if (e.summary.aori) aori.push_back(e.summary.aori->mean);
    r.served_mbit += e.summary.served_mbit;
    r.served_fraction += e.summary.served_fraction;
    r.mean_return += e.episode_return;
    completed += e.summary.completed;
    flagged += e.summary.flagged;
  }
  if (!episodes.empty()) {
    r.served_mbit /= static_cast<double>(episodes.size());
    r.served_fraction /= static_cast<double>(episodes.size());
    r.mean_return /= static_cast<double>(episodes.size());
  }
  r.flagged_fraction = completed ? static_cast<double>(flagged) / static_cast<double>(completed) : 0.0;
  r.aosi = describe(aosi);
  r.aori = describe(aori);
  return r;
}

std::vector<EpisodeMetrics> evaluate_policy(const SimConfig& config, const RewardParams& reward,
                                            const ActionPolicy& policy, int episodes,
                                            std::uint64_t master_seed) {
  SubMetaverseEnv env(config, reward);
  std::vector<EpisodeMetrics> out;
  for (auto seed : evaluation_seeds(master_seed, episodes)) {
    out.push_back(run_episode(env, seed, policy));
  }
  return out;
}

std::vector<double> default_grid() {
  std::vector<double> g;
  for (int i = 0; i <= 10; ++i) g.push_back(i / 10.0);
  return g;
}

std::vector<SplitResult> grid_search(const SimConfig& config, const RewardParams& reward,
                                     std::span<const double> grid, int episodes,
                                     std::uint64_t master_seed) {
  for (double v : grid) {
    if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument("grid values must lie in [0, 1]");
  }
  if (episodes < 1) throw std::invalid_argument("grid_search needs at least one episode");
  std::vector<SplitResult> results;
  results.reserve(grid.size() * grid.size());
  for (double comm : grid) {
    for (double comp : grid) {
      const Action action{comm, comp};
      const auto eps = evaluate_policy(
          config, reward, [action](const Observation&) { return action; }, episodes, master_seed);
      results.push_back(aggregate(comm, comp, eps));
    }
  }
  return results;
}

bool dominates(const ObjectivePoint& a, const ObjectivePoint& b) {
  return a.gain >= b.gain && a.cost <= b.cost && (a.gain > b.gain || a.cost < b.cost);
}

std::vector<std::size_t> pareto_frontier(std::span<const ObjectivePoint> points) {
  if (points.empty()) throw std::invalid_argument("pareto_frontier needs at least one point");
  // Sweep by gain descending (cost ascending on ties); a point survives iff
  // its cost beats every strictly-better-gain point seen so far and it is
  // not a duplicate-gain point with a worse cost.
  std::vector<std::size_t> order(points.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (points[a].gain != points[b].gain) return points[a].gain > points[b].gain;
    return points[a].cost < points[b].cost;
  });
  std::vector<bool> keep(points.size(), false);
  double best_cost = std::numeric_limits<double>::infinity();
  std::size_t i = 0;
  while (i < order.size()) {
    // Group of equal gain; within it the minimum cost sits first.
    std::size_t j = i;
    const double gain = points[order[i]].gain;
    const double group_min = points[order[i]].cost;
    while (j < order.size() && points[order[j]].gain == gain) {
      if (points[order[j]].cost == group_min && group_min < best_cost) keep[order[j]] = true;
      ++j;
    }
    best_cost = std::min(best_cost, group_min);
    i = j;
  }
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < points.size(); ++k) {
    if (keep[k]) out.push_back(k);
  }
  return out;
}

}  // namespace aoilab
