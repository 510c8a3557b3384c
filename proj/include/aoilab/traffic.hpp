#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <vector>

#include "aoilab/config.hpp"
#include "aoilab/rng.hpp"

namespace aoilab {

using Step = std::int64_t;
using UnitId = std::uint64_t;

enum class SourceKind { kUe, kSensor };

/// One UE request or sensor update travelling through the pipeline.
struct ServiceUnit {
  UnitId id = 0;
  SourceKind kind = SourceKind::kUe;
  int source_id = 0;
  Step gen_time = 0;
  Vec2 gen_position;  // device position when the unit was generated
  double comm_size = 0.0;
  double comp_load = 0.0;
  double comm_remaining = 0.0;
  double comp_remaining = 0.0;
  std::optional<Step> tx_start;
  std::optional<Step> bs_arrival;
  std::optional<Step> proc_start;
  std::optional<Step> completion;
};

struct DeviceState {
  int device_id = 0;
  SourceKind kind = SourceKind::kUe;
  Vec2 position;
  Vec2 waypoint;  // UEs only
  std::deque<ServiceUnit> comm_queue;
};

/// Bernoulli arrivals come from `traffic`, Poisson sizes from `sizes`.
struct TrafficStreams {
  Rng traffic;
  Rng sizes;
};

/// Poisson draw conditioned on being >= 1 (zero samples are redrawn).
int positive_poisson(double mean, Rng& rng);

/// Returns UEs first (ids 0..K-1) then sensors (ids 0..N-1).
struct Placement {
  std::vector<DeviceState> ues;
  std::vector<DeviceState> sensors;
};

/// Sensors on a jittered grid spanning the area; UEs and their first
/// waypoints uniform at random.
Placement place_devices(const SimConfig& config, Rng& rng);

/// Each UE emits a request with probability ue_request_prob. Units are
/// appended to the device queue and copies returned.
std::vector<ServiceUnit> generate_ue_arrivals(std::vector<DeviceState>& ues, Step t,
                                              const SimConfig& config, TrafficStreams& rng,
                                              UnitId& next_id);

/// Every sensor emits when t is a multiple of sensor_interval_steps.
std::vector<ServiceUnit> generate_sensor_updates(std::vector<DeviceState>& sensors, Step t,
                                                 const SimConfig& config, TrafficStreams& rng,
                                                 UnitId& next_id);

/// Random-waypoint motion over `dt` seconds; a fresh uniform waypoint is
/// drawn when the current one is reached.
void move_ues(std::vector<DeviceState>& ues, double dt, const SimConfig& config, Rng& rng);

}  // namespace aoilab
