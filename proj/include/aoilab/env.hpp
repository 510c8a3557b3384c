#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "aoilab/aoi.hpp"
#include "aoilab/config.hpp"
#include "aoilab/policy_env.hpp"
#include "aoilab/queueing.hpp"
#include "aoilab/radio.hpp"
#include "aoilab/rng.hpp"
#include "aoilab/traffic.hpp"

namespace aoilab {

/// The two BS computation queue lengths.
struct Observation {
  double ue_queue_len = 0.0;
  double sensor_queue_len = 0.0;

  /// Each length divided by `cap` and clamped to [0, 1].
  std::array<double, 2> normalized(double cap) const;

  friend bool operator==(const Observation&, const Observation&) = default;
};

/// Fractions of bandwidth (comm) and compute (comp) given to the UEs.
struct Action {
  double comm_split = 0.0;
  double comp_split = 0.0;

  Action clamped() const;
};

struct RewardBreakdown {
  double reward = 0.0;
  double sync_reward = 0.0;
  double delay_penalty = 0.0;
};

struct StepOutcome {
  Observation observation;
  double reward = 0.0;
  double sync_reward = 0.0;
  double delay_penalty = 0.0;
  bool done = false;
  std::vector<CompletionRecord> completions;  // UE and sensor records of this step
  double generated_ue_mbit = 0.0;
  double served_ue_mbit = 0.0;
};

class EpisodeFinished : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// r_sync = sum c1 * eta^AoSI, p_delay = sum c2 * [AoRI > D_th] over the UE
/// records; sensor records are ignored.
RewardBreakdown compute_reward(std::span<const CompletionRecord> completions,
                               const RewardParams& params);

/// One sub-metaverse cell as an episodic environment.
///
/// Each step runs, in order: UE mobility, UE/sensor generation, bandwidth
/// allocation and uplink transmission, compute allocation and MEC
/// processing, ledger/reward update, queue observation.
class SubMetaverseEnv {
 public:
  SubMetaverseEnv(SimConfig config, RewardParams reward);

  Observation reset(std::uint64_t seed);
  StepOutcome step(const Action& action);

  Step time() const { return t_; }
  bool done() const { return t_ >= config_.episode_length; }

  const SimConfig& config() const { return config_; }
  const RewardParams& reward_params() const { return reward_; }
  void set_reward_params(const RewardParams& reward);

  const QueueSystem& queues() const { return queues_; }
  const std::vector<CompletionRecord>& ledger() const { return ledger_; }
  double generated_ue_mbit() const { return generated_ue_mbit_; }
  std::size_t generated_ue_units() const { return generated_ue_units_; }

  Observation observe() const;

  /// Installed sink receives every lifecycle transition from the next
  /// reset on; sensor placement and UE generation positions are reported
  /// through `on_position`.
  struct PositionEvent {
    SourceKind kind;
    int device_id;
    UnitId unit_id;  // 0 for placement entries
    Step step;
    Vec2 position;
  };
  void set_trace(TraceSink events, std::function<void(const PositionEvent&)> on_position);

 private:
  SimConfig config_;
  RewardParams reward_;
  QueueSystem queues_;
  SensorHistory history_;
  std::vector<CompletionRecord> ledger_;
  TrafficStreams traffic_rng_{Rng{}, Rng{}};
  Rng mobility_rng_;
  UnitId next_id_ = 1;
  Step t_ = 0;
  bool started_ = false;
  double generated_ue_mbit_ = 0.0;
  std::size_t generated_ue_units_ = 0;
  TraceSink trace_;
  std::function<void(const PositionEvent&)> on_position_;
};

/// Agent-facing view of the environment: features are the queue lengths
/// normalised by `obs_norm_cap`.
class MetaverseTask : public PolicyEnv {
 public:
  MetaverseTask(SimConfig config, RewardParams reward) : env_(std::move(config), reward) {}

  Features reset(std::uint64_t seed) override;
  Transition step(const ActionVec& action) override;

  SubMetaverseEnv& env() { return env_; }

 private:
  SubMetaverseEnv env_;
};

}  // namespace aoilab
