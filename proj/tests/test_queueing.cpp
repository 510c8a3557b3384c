#include <doctest.h>

#include <map>
#include <random>

#include "aoilab/env.hpp"
#include "aoilab/queueing.hpp"

using namespace aoilab;

namespace {

DeviceState device(SourceKind kind, int id) {
  DeviceState d;
  d.kind = kind;
  d.device_id = id;
  return d;
}

ServiceUnit unit(UnitId id, SourceKind kind, int source, double comm, double comp, Step gen = 0) {
  ServiceUnit u;
  u.id = id;
  u.kind = kind;
  u.source_id = source;
  u.gen_time = gen;
  u.comm_size = u.comm_remaining = comm;
  u.comp_load = u.comp_remaining = comp;
  return u;
}

// One UE and one sensor, with the given units queued at the UE.
QueueSystem ue_system(std::vector<ServiceUnit> units) {
  QueueSystem q({device(SourceKind::kUe, 0)}, {device(SourceKind::kSensor, 0)}, 1.0);
  for (auto& u : units) q.ues()[0].comm_queue.push_back(u);
  q.note_generated(units);
  return q;
}

}  // namespace

TEST_CASE("transmission with exact division") {
  auto q = ue_system({unit(1, SourceKind::kUe, 0, 50, 5)});
  const auto arrivals = q.transmit_step({{50.0}, {0.0}}, 4);
  REQUIRE(arrivals.size() == 1);
  CHECK(*arrivals[0].tx_start == 4);
  CHECK(*arrivals[0].bs_arrival == 5);
  CHECK(q.ues()[0].comm_queue.empty());
  CHECK(q.observe() == QueueLengths{1, 0});
}

TEST_CASE("transmission carry-over across steps") {
  auto q = ue_system({unit(1, SourceKind::kUe, 0, 50, 5)});
  CHECK(q.transmit_step({{20.0}, {}}, 0).empty());
  CHECK(q.ues()[0].comm_queue.front().comm_remaining == 30.0);
  CHECK(q.units_in_flight() == 1);
  CHECK(q.transmit_step({{20.0}, {}}, 1).empty());
  CHECK(q.ues()[0].comm_queue.front().comm_remaining == 10.0);
  const auto arrivals = q.transmit_step({{20.0}, {}}, 2);
  REQUIRE(arrivals.size() == 1);
  CHECK(*arrivals[0].tx_start == 0);
  CHECK(*arrivals[0].bs_arrival == 3);
}

TEST_CASE("two small units finish in one step in FIFO order") {
  auto q = ue_system({unit(1, SourceKind::kUe, 0, 10, 1), unit(2, SourceKind::kUe, 0, 10, 1)});
  std::vector<UnitId> trace_order;
  q.set_trace([&](const TraceEvent& e) {
    if (e.event == EventKind::kBsArrival) trace_order.push_back(e.id);
  });
  const auto arrivals = q.transmit_step({{50.0}, {}}, 0);
  REQUIRE(arrivals.size() == 2);
  CHECK(arrivals[0].id == 1);
  CHECK(arrivals[1].id == 2);
  CHECK(*arrivals[0].bs_arrival == *arrivals[1].bs_arrival);
  CHECK(trace_order == std::vector<UnitId>{1, 2});
  CHECK(q.ue_comp_queue().front().id == 1);
}

TEST_CASE("processing") {
  SUBCASE("load equal to capacity completes in one step") {
    auto q = ue_system({unit(1, SourceKind::kUe, 0, 1, 5)});
    q.transmit_step({{1.0}, {}}, 0);
    const auto done = q.process_step({1.0, 5.0, 0.0}, 0);
    REQUIRE(done.size() == 1);
    CHECK(*done[0].proc_start == 1);
    CHECK(*done[0].completion == 1);
  }
  SUBCASE("carry-over flows to the next unit") {
    auto q = ue_system({unit(1, SourceKind::kUe, 0, 1, 7), unit(2, SourceKind::kUe, 0, 1, 4)});
    q.transmit_step({{2.0}, {}}, 0);
    REQUIRE(q.ue_comp_queue().size() == 2);
    const ComputeAllocation three{1.0, 3.0, 0.0};
    CHECK(q.process_step(three, 1).empty());
    CHECK(q.process_step(three, 2).empty());
    const auto done = q.process_step(three, 3);
    REQUIRE(done.size() == 1);
    CHECK(done[0].id == 1);
    CHECK(*done[0].proc_start == 1);
    CHECK(*done[0].completion == 4);
    // Unit 1 needed only its last 1 unit; the other 2 went to unit 2.
    CHECK(q.ue_comp_queue().front().comp_remaining == 2.0);
    CHECK(*q.ue_comp_queue().front().proc_start == 3);
  }
  SUBCASE("UE completions precede sensor completions") {
    QueueSystem q({device(SourceKind::kUe, 0)}, {device(SourceKind::kSensor, 0)}, 1.0);
    q.sensors()[0].comm_queue.push_back(unit(1, SourceKind::kSensor, 0, 1, 1));
    q.ues()[0].comm_queue.push_back(unit(2, SourceKind::kUe, 0, 1, 1));
    q.transmit_step({{1.0}, {1.0}}, 0);
    const auto done = q.process_step(ComputeAllocation::from_split(0.5, 10.0), 1);
    REQUIRE(done.size() == 2);
    CHECK(done[0].kind == SourceKind::kUe);
    CHECK(done[1].kind == SourceKind::kSensor);
  }
}

TEST_CASE("zero UE compute freezes the UE queue") {
  auto q = ue_system({});
  double last = 0.0;
  UnitId id = 1;
  for (Step t = 0; t < 20; ++t) {
    auto u = unit(id++, SourceKind::kUe, 0, 10, 2, t);
    q.ues()[0].comm_queue.push_back(u);
    q.note_generated({u});
    q.transmit_step({{10.0}, {}}, t);
    CHECK(q.process_step(ComputeAllocation::from_split(0.0, 100.0), t).empty());
    const double l = q.observe().ue;
    CHECK(l >= last);
    last = l;
  }
  CHECK(last == 20.0);
}

TEST_CASE("queue observation") {
  CHECK(QueueSystem{}.observe() == QueueLengths{0, 0});
  auto q = ue_system({unit(1, SourceKind::kUe, 0, 10, 1), unit(2, SourceKind::kUe, 0, 20, 1),
                      unit(3, SourceKind::kUe, 0, 5, 1)});
  q.transmit_step({{35.0}, {}}, 0);
  CHECK(q.observe() == QueueLengths{3, 0});
  CHECK(q.observe(QueueLengthUnit::kMbit) == QueueLengths{35, 0});
  q.process_step({1.0, 1.0, 0.0}, 1);
  CHECK(q.observe() == QueueLengths{2, 0});
  CHECK(q.observe(QueueLengthUnit::kMbit) == QueueLengths{25, 0});
}

TEST_CASE("observation matches a recount of the event ledger; units are conserved") {
  SimConfig c;
  c.episode_length = 50;
  Rng rng(21);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    SubMetaverseEnv env(c, {});
    std::map<SourceKind, long> arrived, completed;
    std::map<UnitId, std::pair<EventKind, Step>> last_event;
    std::map<SourceKind, std::vector<UnitId>> arrival_order, completion_order;
    env.set_trace(
        [&](const TraceEvent& e) {
          if (e.event == EventKind::kBsArrival) {
            ++arrived[e.kind];
            arrival_order[e.kind].push_back(e.id);
          }
          if (e.event == EventKind::kCompleted) {
            ++completed[e.kind];
            completion_order[e.kind].push_back(e.id);
          }
          // Lifecycle events of a unit come in order with non-decreasing steps.
          const auto it = last_event.find(e.id);
          if (it != last_event.end()) {
            CHECK(static_cast<int>(e.event) == static_cast<int>(it->second.first) + 1);
            CHECK(e.step >= it->second.second);
          } else {
            CHECK(e.event == EventKind::kGenerated);
          }
          last_event[e.id] = {e.event, e.step};
        },
        {});
    env.reset(seed);
    while (!env.done()) {
      const auto out = env.step({u(rng), u(rng)});
      CHECK(out.observation.ue_queue_len ==
            static_cast<double>(arrived[SourceKind::kUe] - completed[SourceKind::kUe]));
      CHECK(out.observation.sensor_queue_len ==
            static_cast<double>(arrived[SourceKind::kSensor] - completed[SourceKind::kSensor]));
      const auto& q = env.queues();
      CHECK(q.units_generated() == q.units_queued_at_devices() + q.units_in_flight() +
                                       q.ue_comp_queue().size() + q.sensor_comp_queue().size() +
                                       q.units_completed());
    }
    for (auto kind : {SourceKind::kUe, SourceKind::kSensor}) {
      const auto& a = arrival_order[kind];
      const auto& d = completion_order[kind];
      REQUIRE(d.size() <= a.size());
      CHECK(std::equal(d.begin(), d.end(), a.begin()));
    }
  }
}
