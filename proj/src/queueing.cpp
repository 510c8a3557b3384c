#include "aoilab/queueing.hpp"

#include <algorithm>
#include <array>

namespace aoilab {
namespace {

// Residuals below this fraction of the original demand count as served;
// guards against rate * dt products that miss an exact zero by one ulp.
constexpr double kResidualTolerance = 1e-9;

bool finished(double remaining, double total) { return remaining <= kResidualTolerance * total; }

}  // namespace

std::string_view event_name(EventKind kind) {
  static constexpr std::array<std::string_view, 5> names = {"gen", "tx_start", "bs_arrival",
                                                            "proc_start", "complete"};
  return names.at(static_cast<std::size_t>(kind));
}

ComputeAllocation ComputeAllocation::from_split(double rho_p, double total_units) {
  rho_p = std::clamp(rho_p, 0.0, 1.0);
  return {rho_p, rho_p * total_units, (1.0 - rho_p) * total_units};
}

QueueSystem::QueueSystem(std::vector<DeviceState> ues, std::vector<DeviceState> sensors,
                         double step_duration_s)
    : ues_(std::move(ues)), sensors_(std::move(sensors)), step_duration_s_(step_duration_s) {}

void QueueSystem::emit(EventKind kind, const ServiceUnit& unit, Step step) const {
  if (trace_) trace_({kind, step, unit.id, unit.kind, unit.source_id});
}

void QueueSystem::note_generated(const std::vector<ServiceUnit>& units) {
  generated_ += units.size();
  for (const auto& u : units) emit(EventKind::kGenerated, u, u.gen_time);
}

std::vector<bool> QueueSystem::active_ues() const {
  std::vector<bool> active(ues_.size());
  for (std::size_t i = 0; i < ues_.size(); ++i) active[i] = !ues_[i].comm_queue.empty();
  return active;
}

std::vector<bool> QueueSystem::active_sensors() const {
  std::vector<bool> active(sensors_.size());
  for (std::size_t i = 0; i < sensors_.size(); ++i) active[i] = !sensors_[i].comm_queue.empty();
  return active;
}

void QueueSystem::transmit_device(DeviceState& device, double budget, Step t,
                                  std::deque<ServiceUnit>& target, double& target_mbit,
                                  std::vector<ServiceUnit>& arrivals) {
  auto& q = device.comm_queue;
  while (budget > 0.0 && !q.empty()) {
    auto& head = q.front();
    if (!head.tx_start) {
      head.tx_start = t;
      emit(EventKind::kTxStart, head, t);
    }
    const double take = std::min(budget, head.comm_remaining);
    head.comm_remaining -= take;
    budget -= take;
    if (!finished(head.comm_remaining, head.comm_size)) break;
    head.comm_remaining = 0.0;
    head.bs_arrival = t + 1;
    emit(EventKind::kBsArrival, head, t + 1);
    target_mbit += head.comm_size;
    arrivals.push_back(head);
    target.push_back(std::move(head));
    q.pop_front();
  }
}

std::vector<ServiceUnit> QueueSystem::transmit_step(const LinkRates& rates, Step t) {
  std::vector<ServiceUnit> arrivals;
  for (std::size_t i = 0; i < ues_.size(); ++i) {
    const double rate = i < rates.ue_mbps.size() ? rates.ue_mbps[i] : 0.0;
    transmit_device(ues_[i], rate * step_duration_s_, t, ue_comp_, ue_comp_mbit_, arrivals);
  }
  for (std::size_t i = 0; i < sensors_.size(); ++i) {
    const double rate = i < rates.sensor_mbps.size() ? rates.sensor_mbps[i] : 0.0;
    transmit_device(sensors_[i], rate * step_duration_s_, t, sensor_comp_, sensor_comp_mbit_,
                    arrivals);
  }
  return arrivals;
}

void QueueSystem::process_queue(std::deque<ServiceUnit>& queue, double& queue_mbit,
                                double capacity, Step t, std::vector<ServiceUnit>& completed) {
  while (capacity > 0.0 && !queue.empty()) {
    auto& head = queue.front();
    if (!head.proc_start) {
      // A unit that reached the BS during this step starts at its arrival.
      head.proc_start = std::max(t, *head.bs_arrival);
      emit(EventKind::kProcStart, head, *head.proc_start);
    }
    const double take = std::min(capacity, head.comp_remaining);
    head.comp_remaining -= take;
    capacity -= take;
    if (!finished(head.comp_remaining, head.comp_load)) break;
    head.comp_remaining = 0.0;
    head.completion = t + 1;
    emit(EventKind::kCompleted, head, t + 1);
    queue_mbit -= head.comm_size;
    ++completed_;
    completed.push_back(std::move(head));
    queue.pop_front();
  }
}

std::vector<ServiceUnit> QueueSystem::process_step(const ComputeAllocation& alloc, Step t) {
  std::vector<ServiceUnit> completed;
  process_queue(ue_comp_, ue_comp_mbit_, alloc.ue_capacity, t, completed);
  process_queue(sensor_comp_, sensor_comp_mbit_, alloc.sensor_capacity, t, completed);
  return completed;
}

QueueLengths QueueSystem::observe(QueueLengthUnit unit) const {
  if (unit == QueueLengthUnit::kMbit) return {ue_comp_mbit_, sensor_comp_mbit_};
  return {static_cast<double>(ue_comp_.size()), static_cast<double>(sensor_comp_.size())};
}

std::size_t QueueSystem::units_queued_at_devices() const {
  std::size_t n = 0;
  for (const auto* group : {&ues_, &sensors_}) {
    for (const auto& d : *group) n += d.comm_queue.size();
  }
  return n - units_in_flight();
}

std::size_t QueueSystem::units_in_flight() const {
  std::size_t n = 0;
  for (const auto* group : {&ues_, &sensors_}) {
    for (const auto& d : *group) {
      if (!d.comm_queue.empty() && d.comm_queue.front().tx_start) ++n;
    }
  }
  return n;
}

}  // namespace aoilab
