#pragma once

#include <cstddef>
#include <deque>
#include <functional>
#include <string>
#include <vector>

#include "aoilab/config.hpp"
#include "aoilab/traffic.hpp"

namespace aoilab {

/// Lifecycle transitions recorded in the optional event trace.
enum class EventKind { kGenerated, kTxStart, kBsArrival, kProcStart, kCompleted };

std::string_view event_name(EventKind kind);

struct TraceEvent {
  EventKind event = EventKind::kGenerated;
  Step step = 0;
  UnitId id = 0;
  SourceKind kind = SourceKind::kUe;
  int source_id = 0;
};

using TraceSink = std::function<void(const TraceEvent&)>;

/// MEC compute split for one step.
struct ComputeAllocation {
  double ue_fraction = 0.0;
  double ue_capacity = 0.0;
  double sensor_capacity = 0.0;

  static ComputeAllocation from_split(double rho_p, double total_units);
};

/// Uplink rates (Mbit/s) per device id for one step.
struct LinkRates {
  std::vector<double> ue_mbps;
  std::vector<double> sensor_mbps;
};

struct QueueLengths {
  double ue = 0.0;      // l(t)
  double sensor = 0.0;  // l-hat(t)

  friend bool operator==(const QueueLengths&, const QueueLengths&) = default;
};

/// Device communication queues feeding the two BS computation queues.
/// Service is fluid: a unit may receive fractional progress per step and
/// any budget left over after a unit finishes flows to the next unit in the
/// same queue.
class QueueSystem {
 public:
  QueueSystem() = default;
  QueueSystem(std::vector<DeviceState> ues, std::vector<DeviceState> sensors,
              double step_duration_s);

  std::vector<DeviceState>& ues() { return ues_; }
  std::vector<DeviceState>& sensors() { return sensors_; }
  const std::vector<DeviceState>& ues() const { return ues_; }
  const std::vector<DeviceState>& sensors() const { return sensors_; }

  /// Accounts for units that traffic generation appended to device queues.
  void note_generated(const std::vector<ServiceUnit>& units);

  std::vector<bool> active_ues() const;
  std::vector<bool> active_sensors() const;

  /// Head-of-line transmission on every device. Units that finish get
  /// bs_arrival = t + 1 and join the matching computation queue; copies of
  /// them are returned in arrival order.
  std::vector<ServiceUnit> transmit_step(const LinkRates& rates, Step t);

  /// Head-of-line processing on both computation queues. Completed units
  /// carry completion = t + 1; UE completions precede sensor completions.
  std::vector<ServiceUnit> process_step(const ComputeAllocation& alloc, Step t);

  QueueLengths observe(QueueLengthUnit unit = QueueLengthUnit::kCount) const;

  const std::deque<ServiceUnit>& ue_comp_queue() const { return ue_comp_; }
  const std::deque<ServiceUnit>& sensor_comp_queue() const { return sensor_comp_; }

  std::size_t units_generated() const { return generated_; }
  std::size_t units_completed() const { return completed_; }
  /// Units waiting in device queues with no transmission progress yet.
  std::size_t units_queued_at_devices() const;
  /// Units partially transmitted (head of a device queue with tx_start set).
  std::size_t units_in_flight() const;

  void set_trace(TraceSink sink) { trace_ = std::move(sink); }

 private:
  void emit(EventKind kind, const ServiceUnit& unit, Step step) const;
  void transmit_device(DeviceState& device, double budget, Step t,
                       std::deque<ServiceUnit>& target, double& target_mbit,
                       std::vector<ServiceUnit>& arrivals);
  void process_queue(std::deque<ServiceUnit>& queue, double& queue_mbit, double capacity, Step t,
                     std::vector<ServiceUnit>& completed);

  std::vector<DeviceState> ues_;
  std::vector<DeviceState> sensors_;
  double step_duration_s_ = 1.0;
  std::deque<ServiceUnit> ue_comp_;
  std::deque<ServiceUnit> sensor_comp_;
  double ue_comp_mbit_ = 0.0;
  double sensor_comp_mbit_ = 0.0;
  std::size_t generated_ = 0;
  std::size_t completed_ = 0;
  TraceSink trace_;
};

}  // namespace aoilab
