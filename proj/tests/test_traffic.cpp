#include <doctest.h>

#include <cmath>

#include "aoilab/rng.hpp"
#include "aoilab/traffic.hpp"

using namespace aoilab;

namespace {

TrafficStreams streams(std::uint64_t seed) {
  const RngHub hub(seed);
  return {hub.derive(Stream::kTraffic), hub.derive(Stream::kSizes)};
}

bool inside(Vec2 p, const SimConfig& c) {
  return p.x >= 0.0 && p.x <= c.area_width_m && p.y >= 0.0 && p.y <= c.area_height_m;
}

}  // namespace

TEST_CASE("degenerate Bernoulli arrivals") {
  SimConfig c;
  Rng rng(1);
  auto p = place_devices(c, rng);
  auto s = streams(1);
  UnitId next = 1;
  c.ue_request_prob = 0.0;
  for (Step t = 0; t < 50; ++t) CHECK(generate_ue_arrivals(p.ues, t, c, s, next).empty());
  c.ue_request_prob = 1.0;
  for (Step t = 0; t < 50; ++t) CHECK(generate_ue_arrivals(p.ues, t, c, s, next).size() == 10);
  CHECK(p.ues[0].comm_queue.size() == 50);
}

TEST_CASE("arrival rate and mean size match the configuration") {
  SimConfig c;
  Rng rng(2);
  auto p = place_devices(c, rng);
  auto s = streams(2);
  UnitId next = 1;
  std::vector<int> per_ue(c.num_ues, 0);
  double size_sum = 0.0;
  std::size_t units = 0;
  const int steps = 10'000;
  for (Step t = 0; t < steps; ++t) {
    for (const auto& u : generate_ue_arrivals(p.ues, t, c, s, next)) {
      ++per_ue[u.source_id];
      size_sum += u.comm_size;
      ++units;
      CHECK(u.gen_time == t);
      CHECK(u.comm_size >= 1.0);
      CHECK(u.comp_load >= 1.0);
      CHECK(u.comm_remaining == u.comm_size);
      CHECK_FALSE(u.tx_start.has_value());
      CHECK_FALSE(u.completion.has_value());
    }
    for (auto& ue : p.ues) ue.comm_queue.clear();
  }
  for (int k : per_ue) {
    const double rate = static_cast<double>(k) / steps;
    CHECK(rate >= 0.68);
    CHECK(rate <= 0.72);
  }
  CHECK(std::abs(size_sum / units - 50.0) / 50.0 < 0.02);
}

TEST_CASE("periodic sensor updates") {
  SimConfig c;
  Rng rng(3);
  auto p = place_devices(c, rng);
  auto s = streams(3);
  UnitId next = 1;
  for (Step t = 0; t < 5; ++t) CHECK(generate_sensor_updates(p.sensors, t, c, s, next).size() == 15);
  c.sensor_interval_steps = 5;
  CHECK(generate_sensor_updates(p.sensors, 3, c, s, next).empty());
  const auto at0 = generate_sensor_updates(p.sensors, 0, c, s, next);
  REQUIRE(at0.size() == 15);
  for (int n = 0; n < 15; ++n) {
    CHECK(at0[n].source_id == n);
    CHECK(at0[n].kind == SourceKind::kSensor);
    CHECK(at0[n].gen_position == p.sensors[n].position);
  }
  CHECK(generate_sensor_updates(p.sensors, 10, c, s, next).size() == 15);
}

TEST_CASE("unit ids are unique and increasing") {
  SimConfig c;
  Rng rng(4);
  auto p = place_devices(c, rng);
  auto s = streams(4);
  UnitId next = 1, last = 0;
  for (Step t = 0; t < 100; ++t) {
    auto a = generate_ue_arrivals(p.ues, t, c, s, next);
    auto b = generate_sensor_updates(p.sensors, t, c, s, next);
    a.insert(a.end(), b.begin(), b.end());
    for (const auto& u : a) {
      CHECK(u.id > last);
      last = u.id;
    }
  }
}

TEST_CASE("positive Poisson never returns zero") {
  Rng rng(5);
  for (int i = 0; i < 10'000; ++i) CHECK(positive_poisson(0.3, rng) >= 1);
}

TEST_CASE("random waypoint mobility") {
  SimConfig c;
  Rng place(6), move(7);
  auto p = place_devices(c, place);

  SUBCASE("zero speed freezes positions") {
    c.ue_speed_mps = 0.0;
    const auto before = p.ues;
    move_ues(p.ues, 1.0, c, move);
    for (std::size_t k = 0; k < before.size(); ++k) CHECK(p.ues[k].position == before[k].position);
  }
  SUBCASE("speed bound and area bounds over 10,000 steps") {
    c.ue_speed_mps = 20.0;
    for (int t = 0; t < 10'000; ++t) {
      const auto before = p.ues;
      move_ues(p.ues, c.step_duration_s, c, move);
      for (std::size_t k = 0; k < before.size(); ++k) {
        CHECK(distance(before[k].position, p.ues[k].position) <= 20.0 + 1e-9);
        CHECK(inside(p.ues[k].position, c));
        CHECK(inside(p.ues[k].waypoint, c));
      }
    }
  }
}

TEST_CASE("device placement") {
  SimConfig c;
  SUBCASE("single sensor sits near the center") {
    c.num_sensors = 1;
    Rng rng(8);
    const auto p = place_devices(c, rng);
    REQUIRE(p.sensors.size() == 1);
    CHECK(std::abs(p.sensors[0].position.x - 250.0) <= 0.25 * 500.0);
    CHECK(std::abs(p.sensors[0].position.y - 250.0) <= 0.25 * 500.0);
  }
  SUBCASE("fifteen sensors are distinct and UEs are inside") {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      Rng rng(seed);
      const auto p = place_devices(c, rng);
      REQUIRE(p.sensors.size() == 15);
      REQUIRE(p.ues.size() == 10);
      for (std::size_t i = 0; i < p.sensors.size(); ++i) {
        CHECK(p.sensors[i].device_id == static_cast<int>(i));
        CHECK(inside(p.sensors[i].position, c));
        for (std::size_t j = i + 1; j < p.sensors.size(); ++j) {
          CHECK(distance(p.sensors[i].position, p.sensors[j].position) > 0.0);
        }
      }
      for (const auto& u : p.ues) CHECK(inside(u.position, c));
    }
  }
}
