#include "aoilab/traffic.hpp"

#include <cmath>

namespace aoilab {
namespace {

Vec2 uniform_point(const SimConfig& c, Rng& rng) {
  std::uniform_real_distribution<double> ux(0.0, c.area_width_m);
  std::uniform_real_distribution<double> uy(0.0, c.area_height_m);
  const double x = ux(rng);
  const double y = uy(rng);
  return {x, y};
}

ServiceUnit make_unit(SourceKind kind, const DeviceState& device, Step t, double comm_mean,
                      double comp_mean, Rng& sizes, UnitId& next_id) {
  ServiceUnit u;
  u.id = next_id++;
  u.kind = kind;
  u.source_id = device.device_id;
  u.gen_time = t;
  u.gen_position = device.position;
  u.comm_size = positive_poisson(comm_mean, sizes);
  u.comp_load = positive_poisson(comp_mean, sizes);
  u.comm_remaining = u.comm_size;
  u.comp_remaining = u.comp_load;
  return u;
}

}  // namespace

int positive_poisson(double mean, Rng& rng) {
  std::poisson_distribution<int> dist(mean);
  int v = 0;
  while (v == 0) v = dist(rng);
  return v;
}

Placement place_devices(const SimConfig& c, Rng& rng) {
  Placement p;

  const int n = c.num_sensors;
  const int cols = std::max(
      1, static_cast<int>(std::ceil(std::sqrt(n * c.area_width_m / c.area_height_m))));
  const int rows = (n + cols - 1) / cols;
  const double cell_h = c.area_height_m / rows;
  std::uniform_real_distribution<double> jitter(-0.25, 0.25);
  p.sensors.reserve(n);
  for (int i = 0; i < n; ++i) {
    const int row = i / cols;
    // The last row may be partial; spread its sensors over the full width.
    const int in_row = (row == rows - 1) ? n - row * cols : cols;
    const double w = c.area_width_m / in_row;
    const int col = i % cols;
    DeviceState s;
    s.device_id = i;
    s.kind = SourceKind::kSensor;
    const double jx = jitter(rng);
    const double jy = jitter(rng);
    s.position = {(col + 0.5 + jx) * w, (row + 0.5 + jy) * cell_h};
    s.waypoint = s.position;
    p.sensors.push_back(std::move(s));
  }

  p.ues.reserve(c.num_ues);
  for (int k = 0; k < c.num_ues; ++k) {
    DeviceState u;
    u.device_id = k;
    u.kind = SourceKind::kUe;
    u.position = uniform_point(c, rng);
    u.waypoint = uniform_point(c, rng);
    p.ues.push_back(std::move(u));
  }
  return p;
}

std::vector<ServiceUnit> generate_ue_arrivals(std::vector<DeviceState>& ues, Step t,
                                              const SimConfig& c, TrafficStreams& rng,
                                              UnitId& next_id) {
  std::vector<ServiceUnit> out;
  std::bernoulli_distribution request(c.ue_request_prob);
  for (auto& ue : ues) {
    if (!request(rng.traffic)) continue;
    auto unit = make_unit(SourceKind::kUe, ue, t, c.ue_comm_mean_mbit, c.ue_comp_mean_units,
                          rng.sizes, next_id);
    out.push_back(unit);
    ue.comm_queue.push_back(std::move(unit));
  }
  return out;
}

std::vector<ServiceUnit> generate_sensor_updates(std::vector<DeviceState>& sensors, Step t,
                                                 const SimConfig& c, TrafficStreams& rng,
                                                 UnitId& next_id) {
  std::vector<ServiceUnit> out;
  if (t % c.sensor_interval_steps != 0) return out;
  for (auto& sensor : sensors) {
    auto unit = make_unit(SourceKind::kSensor, sensor, t, c.sensor_comm_mean_mbit,
                          c.sensor_comp_mean_units, rng.sizes, next_id);
    out.push_back(unit);
    sensor.comm_queue.push_back(std::move(unit));
  }
  return out;
}

void move_ues(std::vector<DeviceState>& ues, double dt, const SimConfig& c, Rng& rng) {
  const double reach = c.ue_speed_mps * dt;
  if (reach <= 0.0) return;
  for (auto& ue : ues) {
    const double dx = ue.waypoint.x - ue.position.x;
    const double dy = ue.waypoint.y - ue.position.y;
    const double d = std::sqrt(dx * dx + dy * dy);
    if (d <= reach) {
      ue.position = ue.waypoint;
      ue.waypoint = uniform_point(c, rng);
    } else {
      ue.position.x += dx / d * reach;
      ue.position.y += dy / d * reach;
    }
  }
}

}  // namespace aoilab
