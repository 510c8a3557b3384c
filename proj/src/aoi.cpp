#include "aoilab/aoi.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <stdexcept>
#include <tuple>

namespace aoilab {

bool fresher(const SensorUpdate& a, const SensorUpdate& b) {
  return std::tie(a.gen_time, a.completion, a.id) > std::tie(b.gen_time, b.completion, b.id);
}

void SensorHistory::record(int sensor, const SensorUpdate& update) {
  auto& list = updates_.at(sensor);
  auto& best = best_.at(sensor);
  if (!list.empty() && update.completion < list.back().completion) {
    throw std::invalid_argument("sensor updates must be recorded in completion order");
  }
  std::size_t idx = list.size();
  if (!best.empty() && !fresher(update, list[best.back()])) idx = best.back();
  list.push_back(update);
  best.push_back(idx);
}

std::optional<SensorUpdate> SensorHistory::reference_update(int sensor,
                                                            Step request_completion) const {
  const auto& list = updates_.at(sensor);
  auto it = std::lower_bound(
      list.begin(), list.end(), request_completion,
      [](const SensorUpdate& u, Step c) { return u.completion < c; });
  const auto n = static_cast<std::size_t>(it - list.begin());
  if (n == 0) return std::nullopt;
  return list[best_.at(sensor)[n - 1]];
}

int select_sensor(Vec2 ue_position, std::span<const DeviceState> sensors) {
  if (sensors.empty()) throw std::invalid_argument("select_sensor needs at least one sensor");
  int best = sensors.front().device_id;
  double best_d2 = std::numeric_limits<double>::infinity();
  for (const auto& s : sensors) {
    const double dx = s.position.x - ue_position.x;
    const double dy = s.position.y - ue_position.y;
    const double d2 = dx * dx + dy * dy;
    if (d2 < best_d2 || (d2 == best_d2 && s.device_id < best)) {
      best_d2 = d2;
      best = s.device_id;
    }
  }
  return best;
}

double compute_aosi(Step request_gen, Step reference_gen) {
  return static_cast<double>(request_gen > reference_gen ? request_gen - reference_gen
                                                         : reference_gen - request_gen);
}

double compute_aori(const ServiceUnit& u) {
  if (!u.tx_start || !u.bs_arrival || !u.proc_start || !u.completion) {
    throw std::invalid_argument("compute_aori: unit " + std::to_string(u.id) +
                                " has an unset lifecycle timestamp");
  }
  return static_cast<double>(*u.completion - u.gen_time);
}

CompletionRecord make_record(const ServiceUnit& u, std::span<const DeviceState> sensors,
                             const SensorHistory& history, Step episode_start) {
  CompletionRecord r;
  r.aori = compute_aori(u);
  r.id = u.id;
  r.kind = u.kind;
  r.source_id = u.source_id;
  r.gen_time = u.gen_time;
  r.tx_start = *u.tx_start;
  r.bs_arrival = *u.bs_arrival;
  r.proc_start = *u.proc_start;
  r.completion = *u.completion;
  r.comm_size = u.comm_size;
  if (u.kind == SourceKind::kSensor) return r;

  r.selected_sensor = select_sensor(u.gen_position, sensors);
  if (auto ref = history.reference_update(r.selected_sensor, r.completion)) {
    r.reference_update_id = ref->id;
    r.aosi = compute_aosi(r.gen_time, ref->gen_time);
  } else {
    r.flagged = true;
    r.aosi = static_cast<double>(r.gen_time - episode_start);
  }
  return r;
}

std::optional<Stat> describe(std::span<const double> values) {
  if (values.empty()) return std::nullopt;
  const double n = static_cast<double>(values.size());
  double sum = 0.0;
  for (double v : values) sum += v;
  const double mean = sum / n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double sd = values.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  return Stat{mean, sd};
}

double offered_ue_mbit(const SimConfig& c, Step horizon) {
  return c.num_ues * c.ue_request_prob * static_cast<double>(horizon) * c.ue_comm_mean_mbit;
}

ThroughputSummary throughput_summary(std::span<const CompletionRecord> ledger,
                                     const SimConfig& config, Step horizon) {
  if (horizon <= 0) throw std::invalid_argument("throughput_summary: horizon must be > 0");
  ThroughputSummary s;
  std::vector<double> aori;
  std::vector<double> aosi;
  for (const auto& r : ledger) {
    if (r.kind != SourceKind::kUe) continue;
    s.served_mbit += r.comm_size;
    ++s.completed;
    if (r.flagged) ++s.flagged;
    aori.push_back(r.aori);
    aosi.push_back(r.aosi);
  }
  const double offered = offered_ue_mbit(config, horizon);
  s.served_fraction = offered > 0.0 ? s.served_mbit / offered : 0.0;
  s.aori = describe(aori);
  s.aosi = describe(aosi);
  return s;
}

}  // namespace aoilab
