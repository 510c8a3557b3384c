#pragma once

#include <optional>
#include <span>
#include <vector>

#include "aoilab/traffic.hpp"

namespace aoilab {

/// Immutable ledger entry written when a unit finishes processing. The
/// AoSI fields are only meaningful for UE records.
struct CompletionRecord {
  UnitId id = 0;
  SourceKind kind = SourceKind::kUe;
  int source_id = 0;
  Step gen_time = 0;
  Step tx_start = 0;
  Step bs_arrival = 0;
  Step proc_start = 0;
  Step completion = 0;
  double comm_size = 0.0;
  double aori = 0.0;
  double aosi = 0.0;
  int selected_sensor = -1;
  std::optional<UnitId> reference_update_id;
  // No update of the selected sensor had been processed; aosi then holds
  // the age of a virtual snapshot taken at the episode start.
  bool flagged = false;

  Step queueing_delay() const { return tx_start - gen_time; }
  Step transmission_delay() const { return bs_arrival - tx_start; }
  Step bs_waiting_delay() const { return proc_start - bs_arrival; }
  Step processing_delay() const { return completion - proc_start; }
};

struct SensorUpdate {
  UnitId id = 0;
  Step gen_time = 0;
  Step completion = 0;
};

/// Processed updates per sensor, in completion order, with a running best
/// so that reference lookups cost one binary search.
class SensorHistory {
 public:
  explicit SensorHistory(std::size_t num_sensors = 0) : updates_(num_sensors), best_(num_sensors) {}

  /// Completion times for one sensor must be appended in non-decreasing order.
  void record(int sensor, const SensorUpdate& update);

  std::span<const SensorUpdate> updates(int sensor) const { return updates_.at(sensor); }

  /// Among the sensor's updates completed strictly before
  /// `request_completion`, the one with the largest generation time (ties:
  /// latest completion, then highest id). Empty when there is none.
  std::optional<SensorUpdate> reference_update(int sensor, Step request_completion) const;

 private:
  std::vector<std::vector<SensorUpdate>> updates_;
  std::vector<std::vector<std::size_t>> best_;  // best_[s][i]: best index in updates_[s][0..i]
};

/// Ordering used to choose the reference update: generation time, then
/// completion, then id.
bool fresher(const SensorUpdate& a, const SensorUpdate& b);

/// Nearest sensor by Euclidean distance; ties go to the lowest id.
int select_sensor(Vec2 ue_position, std::span<const DeviceState> sensors);

/// |request_gen - reference_gen|.
double compute_aosi(Step request_gen, Step reference_gen);

/// completion - gen, which equals the sum of the four delay components.
/// Throws std::invalid_argument when a lifecycle timestamp is missing.
double compute_aori(const ServiceUnit& unit);

/// Builds the ledger entry for a completed unit. UE records look up their
/// reference update in `history`.
CompletionRecord make_record(const ServiceUnit& unit, std::span<const DeviceState> sensors,
                             const SensorHistory& history, Step episode_start);

struct Stat {
  double mean = 0.0;
  double sd = 0.0;  // sample standard deviation; 0 for a single value
};

/// Mean/sample-sd, or nothing for an empty input.
std::optional<Stat> describe(std::span<const double> values);

struct ThroughputSummary {
  double served_mbit = 0.0;
  double served_fraction = 0.0;
  std::size_t completed = 0;
  std::size_t flagged = 0;
  std::optional<Stat> aori;
  std::optional<Stat> aosi;
};

/// Expected offered UE load over `horizon` steps: K * p * horizon * mean size.
double offered_ue_mbit(const SimConfig& config, Step horizon);

ThroughputSummary throughput_summary(std::span<const CompletionRecord> ledger,
                                     const SimConfig& config, Step horizon);

}  // namespace aoilab
