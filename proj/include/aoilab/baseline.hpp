#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "aoilab/aoi.hpp"
#include "aoilab/config.hpp"
#include "aoilab/env.hpp"

namespace aoilab {

/// Metrics of one evaluated episode.
struct EpisodeMetrics {
  std::uint64_t seed = 0;
  double episode_return = 0.0;
  double generated_ue_mbit = 0.0;
  ThroughputSummary summary;
};

/// Aggregate over episodes: means/sds of the per-episode mean delays,
/// mean served Mbit and mean served fraction.
struct SplitResult {
  double comm_split = 0.0;
  double comp_split = 0.0;
  std::optional<Stat> aosi;
  std::optional<Stat> aori;
  double served_mbit = 0.0;
  double served_fraction = 0.0;
  double flagged_fraction = 0.0;
  double mean_return = 0.0;
  int episodes = 0;
};

using ActionPolicy = std::function<Action(const Observation&)>;

/// Runs one episode of `horizon` steps from reset(seed).
EpisodeMetrics run_episode(SubMetaverseEnv& env, std::uint64_t seed, const ActionPolicy& policy);

/// Episode seeds shared by every compared configuration (common random
/// numbers).
std::vector<std::uint64_t> evaluation_seeds(std::uint64_t master_seed, int episodes);

SplitResult aggregate(double comm_split, double comp_split,
                      std::span<const EpisodeMetrics> episodes);

/// Evaluates `policy` over `episodes` seeded episodes of `horizon` steps.
std::vector<EpisodeMetrics> evaluate_policy(const SimConfig& config, const RewardParams& reward,
                                            const ActionPolicy& policy, int episodes,
                                            std::uint64_t master_seed);

/// {0, 0.1, ..., 1}.
std::vector<double> default_grid();

/// Every (comm, comp) pair of `grid`, comm-major, each with the constant
/// action over the shared seed set. `config.episode_length` is the horizon.
std::vector<SplitResult> grid_search(const SimConfig& config, const RewardParams& reward,
                                     std::span<const double> grid, int episodes,
                                     std::uint64_t master_seed);

/// Objective pair: `gain` is maximised, `cost` minimised.
struct ObjectivePoint {
  double gain = 0.0;
  double cost = 0.0;
};

/// True when `a` is at least as good as `b` in both objectives and strictly
/// better in one.
bool dominates(const ObjectivePoint& a, const ObjectivePoint& b);

/// Indices of the non-dominated points, in input order. Throws on empty input.
std::vector<std::size_t> pareto_frontier(std::span<const ObjectivePoint> points);

}  // namespace aoilab
