#include "aoilab/env.hpp"

#include <algorithm>
#include <cmath>

namespace aoilab {

std::array<double, 2> Observation::normalized(double cap) const {
  return {std::clamp(ue_queue_len / cap, 0.0, 1.0), std::clamp(sensor_queue_len / cap, 0.0, 1.0)};
}

Action Action::clamped() const {
  auto unit = [](double v) { return std::isnan(v) ? 0.0 : std::clamp(v, 0.0, 1.0); };
  return {unit(comm_split), unit(comp_split)};
}

RewardBreakdown compute_reward(std::span<const CompletionRecord> completions,
                               const RewardParams& p) {
  RewardBreakdown r;
  for (const auto& c : completions) {
    if (c.kind != SourceKind::kUe) continue;
    r.sync_reward += p.sync_base * std::pow(p.sync_discount, c.aosi);
    if (c.aori > p.delay_threshold_steps) r.delay_penalty += p.delay_penalty;
  }
  r.reward = r.sync_reward + r.delay_penalty;
  return r;
}

SubMetaverseEnv::SubMetaverseEnv(SimConfig config, RewardParams reward)
    : config_(std::move(config)), reward_(reward) {
  validate(config_);
  validate(reward_);
}

void SubMetaverseEnv::set_reward_params(const RewardParams& reward) {
  validate(reward);
  reward_ = reward;
}

void SubMetaverseEnv::set_trace(TraceSink events,
                                std::function<void(const PositionEvent&)> on_position) {
  trace_ = std::move(events);
  on_position_ = std::move(on_position);
}

Observation SubMetaverseEnv::observe() const {
  const auto l = queues_.observe(config_.queue_length_unit);
  return {l.ue, l.sensor};
}

Observation SubMetaverseEnv::reset(std::uint64_t seed) {
  const RngHub hub(seed);
  Rng placement_rng = hub.derive(Stream::kPlacement);
  auto placement = place_devices(config_, placement_rng);
  traffic_rng_ = {hub.derive(Stream::kTraffic), hub.derive(Stream::kSizes)};
  mobility_rng_ = hub.derive(Stream::kMobility);

  queues_ = QueueSystem(std::move(placement.ues), std::move(placement.sensors),
                        config_.step_duration_s);
  queues_.set_trace(trace_);
  history_ = SensorHistory(static_cast<std::size_t>(config_.num_sensors));
  ledger_.clear();
  next_id_ = 1;
  t_ = 0;
  started_ = true;
  generated_ue_mbit_ = 0.0;
  generated_ue_units_ = 0;

  if (on_position_) {
    for (const auto& s : queues_.sensors()) {
      on_position_({SourceKind::kSensor, s.device_id, 0, 0, s.position});
    }
  }
  return observe();
}

StepOutcome SubMetaverseEnv::step(const Action& raw_action) {
  if (!started_) throw EpisodeFinished("step() called before reset()");
  if (done()) throw EpisodeFinished("step() called after the episode finished");
  const Action action = raw_action.clamped();
  const Step t = t_;
  StepOutcome out;

  move_ues(queues_.ues(), config_.step_duration_s, config_, mobility_rng_);

  auto ue_units = generate_ue_arrivals(queues_.ues(), t, config_, traffic_rng_, next_id_);
  auto sensor_units =
      generate_sensor_updates(queues_.sensors(), t, config_, traffic_rng_, next_id_);
  for (const auto& u : ue_units) {
    out.generated_ue_mbit += u.comm_size;
    if (on_position_) on_position_({u.kind, u.source_id, u.id, t, u.gen_position});
  }
  generated_ue_mbit_ += out.generated_ue_mbit;
  generated_ue_units_ += ue_units.size();
  queues_.note_generated(ue_units);
  queues_.note_generated(sensor_units);

  const auto bw = allocate_bandwidth(action.comm_split, config_.bandwidth_mhz,
                                     queues_.active_ues(), queues_.active_sensors());
  LinkRates rates;
  rates.ue_mbps.resize(bw.ue_mhz.size());
  rates.sensor_mbps.resize(bw.sensor_mhz.size());
  for (std::size_t i = 0; i < bw.ue_mhz.size(); ++i) {
    rates.ue_mbps[i] = link_budget(queues_.ues()[i].position, bw.ue_mhz[i], config_).rate_mbps;
  }
  for (std::size_t i = 0; i < bw.sensor_mhz.size(); ++i) {
    rates.sensor_mbps[i] =
        link_budget(queues_.sensors()[i].position, bw.sensor_mhz[i], config_).rate_mbps;
  }
  queues_.transmit_step(rates, t);

  const auto compute = ComputeAllocation::from_split(action.comp_split, config_.compute_units);
  const auto finished = queues_.process_step(compute, t);

  // UE completions come first and are looked up against sensor updates
  // completed strictly earlier, so this step's sensor completions are
  // recorded afterwards.
  for (const auto& unit : finished) {
    auto record = make_record(unit, queues_.sensors(), history_, 0);
    if (unit.kind == SourceKind::kSensor) {
      history_.record(unit.source_id, {unit.id, unit.gen_time, *unit.completion});
    } else {
      out.served_ue_mbit += unit.comm_size;
    }
    ledger_.push_back(record);
    out.completions.push_back(std::move(record));
  }

  const auto r = compute_reward(out.completions, reward_);
  out.reward = r.reward;
  out.sync_reward = r.sync_reward;
  out.delay_penalty = r.delay_penalty;

  ++t_;
  out.observation = observe();
  out.done = done();
  return out;
}

Features MetaverseTask::reset(std::uint64_t seed) {
  return env_.reset(seed).normalized(env_.config().obs_norm_cap);
}

PolicyEnv::Transition MetaverseTask::step(const ActionVec& action) {
  const auto out = env_.step({action[0], action[1]});
  return {out.observation.normalized(env_.config().obs_norm_cap), out.reward, out.done};
}

}  // namespace aoilab
