#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace aoilab {

/// Raised for unparsable documents, unknown keys and out-of-range values.
/// `field()` names the offending key when one is known.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& what)
      : std::runtime_error(what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Vec2&, const Vec2&) = default;
};

inline double distance(Vec2 a, Vec2 b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return std::sqrt(dx * dx + dy * dy);
}

/// How the two BS computation queue lengths are measured.
enum class QueueLengthUnit { kCount, kMbit };

/// Scenario parameters. Defaults reproduce the single-cell reference setup:
/// 10 mobile UEs, 15 static sensors, 100 MHz, 100 compute units per step.
struct SimConfig {
  int num_ues = 10;
  int num_sensors = 15;
  double area_width_m = 500.0;
  double area_height_m = 500.0;
  Vec2 bs_position{250.0, 250.0};
  double bs_height_m = 40.0;
  double device_height_m = 1.5;
  double bandwidth_mhz = 100.0;
  double carrier_ghz = 3.5;
  double tx_power_dbm = 40.0;
  double compute_units = 100.0;
  double ue_request_prob = 0.7;
  double ue_comm_mean_mbit = 50.0;
  double ue_comp_mean_units = 5.0;
  int sensor_interval_steps = 1;
  double sensor_comm_mean_mbit = 70.0;
  double sensor_comp_mean_units = 7.0;
  double ue_speed_mps = 1.5;
  double step_duration_s = 1.0;
  int episode_length = 100;
  double noise_dbm_per_hz = -174.0;
  double pathloss_exponent = 3.0;
  double reference_loss_db = 43.3;
  QueueLengthUnit queue_length_unit = QueueLengthUnit::kCount;
  double obs_norm_cap = 200.0;

  friend bool operator==(const SimConfig&, const SimConfig&) = default;
};

/// Reward shaping constants: r = sum c1 * eta^AoSI + sum c2 * [AoRI > D_th].
struct RewardParams {
  double sync_base = 10.0;
  double sync_discount = 0.9;
  double delay_penalty = -1.0;
  double delay_threshold_steps = 2.0;
  double gamma = 0.99;

  friend bool operator==(const RewardParams&, const RewardParams&) = default;
};

struct ExperimentConfig {
  SimConfig sim;
  RewardParams reward;
  std::uint64_t master_seed = 0;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

void validate(const SimConfig& config);
void validate(const RewardParams& params);

/// Parses a flat `key: value` document (YAML or JSON object). Missing keys
/// keep their defaults; unknown keys are rejected by name.
ExperimentConfig load_config(std::string_view document);
ExperimentConfig load_config_file(const std::string& path);

/// Emits every key, one `key: value` line each, in a stable order.
std::string to_text(const ExperimentConfig& config);

}  // namespace aoilab
