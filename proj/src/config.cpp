#include "aoilab/config.hpp"

#include <yaml-cpp/yaml.h>

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <vector>

namespace aoilab {
namespace {

std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

void require(bool ok, const char* field, const std::string& msg) {
  if (!ok) throw ConfigError(field, std::string(field) + ": " + msg);
}

// One entry per accepted key. Readers pull a scalar out of the node and
// store it; writers render the current value.
struct KeySpec {
  std::string name;
  std::function<void(ExperimentConfig&, const YAML::Node&)> read;
  std::function<std::string(const ExperimentConfig&)> write;
};

template <typename T>
T scalar(const YAML::Node& node, const std::string& key) {
  if (!node.IsScalar()) throw ConfigError(key, key + ": expected a scalar value");
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError(key, key + ": cannot convert '" + node.Scalar() + "'");
  }
}

template <typename Member>
KeySpec real_key(std::string name, Member member) {
  return {name,
          [member, name](ExperimentConfig& c, const YAML::Node& n) {
            std::invoke(member, c) = scalar<double>(n, name);
          },
          [member](const ExperimentConfig& c) { return format_double(std::invoke(member, c)); }};
}

template <typename Member>
KeySpec int_key(std::string name, Member member) {
  return {name,
          [member, name](ExperimentConfig& c, const YAML::Node& n) {
            std::invoke(member, c) = scalar<int>(n, name);
          },
          [member](const ExperimentConfig& c) { return std::to_string(std::invoke(member, c)); }};
}

#define SIM(field) [](auto& c) -> auto& { return c.sim.field; }
#define REW(field) [](auto& c) -> auto& { return c.reward.field; }

const std::vector<KeySpec>& key_specs() {
  static const std::vector<KeySpec> specs = {
      int_key("num_ues", SIM(num_ues)),
      int_key("num_sensors", SIM(num_sensors)),
      real_key("area_width_m", SIM(area_width_m)),
      real_key("area_height_m", SIM(area_height_m)),
      real_key("bs_x_m", SIM(bs_position.x)),
      real_key("bs_y_m", SIM(bs_position.y)),
      real_key("bs_height_m", SIM(bs_height_m)),
      real_key("device_height_m", SIM(device_height_m)),
      real_key("bandwidth_mhz", SIM(bandwidth_mhz)),
      real_key("carrier_ghz", SIM(carrier_ghz)),
      real_key("tx_power_dbm", SIM(tx_power_dbm)),
      real_key("compute_units", SIM(compute_units)),
      real_key("ue_request_prob", SIM(ue_request_prob)),
      real_key("ue_comm_mean_mbit", SIM(ue_comm_mean_mbit)),
      real_key("ue_comp_mean_units", SIM(ue_comp_mean_units)),
      int_key("sensor_interval_steps", SIM(sensor_interval_steps)),
      real_key("sensor_comm_mean_mbit", SIM(sensor_comm_mean_mbit)),
      real_key("sensor_comp_mean_units", SIM(sensor_comp_mean_units)),
      real_key("ue_speed_mps", SIM(ue_speed_mps)),
      real_key("step_duration_s", SIM(step_duration_s)),
      int_key("episode_length", SIM(episode_length)),
      real_key("noise_dbm_per_hz", SIM(noise_dbm_per_hz)),
      real_key("pathloss_exponent", SIM(pathloss_exponent)),
      real_key("reference_loss_db", SIM(reference_loss_db)),
      {"queue_length_unit",
       [](ExperimentConfig& c, const YAML::Node& n) {
         const auto v = scalar<std::string>(n, "queue_length_unit");
         if (v == "count") {
           c.sim.queue_length_unit = QueueLengthUnit::kCount;
         } else if (v == "mbit") {
           c.sim.queue_length_unit = QueueLengthUnit::kMbit;
         } else {
           throw ConfigError("queue_length_unit",
                             "queue_length_unit: expected 'count' or 'mbit', got '" + v + "'");
         }
       },
       [](const ExperimentConfig& c) {
         return std::string(c.sim.queue_length_unit == QueueLengthUnit::kCount ? "count" : "mbit");
       }},
      real_key("obs_norm_cap", SIM(obs_norm_cap)),
      real_key("sync_base", REW(sync_base)),
      real_key("sync_discount", REW(sync_discount)),
      real_key("delay_penalty", REW(delay_penalty)),
      real_key("delay_threshold_steps", REW(delay_threshold_steps)),
      real_key("gamma", REW(gamma)),
      {"master_seed",
       [](ExperimentConfig& c, const YAML::Node& n) {
         c.master_seed = scalar<std::uint64_t>(n, "master_seed");
       },
       [](const ExperimentConfig& c) { return std::to_string(c.master_seed); }},
  };
  return specs;
}

#undef SIM
#undef REW

}  // namespace

void validate(const SimConfig& c) {
  require(c.num_ues >= 1, "num_ues", "must be >= 1");
  require(c.num_sensors >= 1, "num_sensors", "must be >= 1");
  require(c.area_width_m > 0, "area_width_m", "must be > 0");
  require(c.area_height_m > 0, "area_height_m", "must be > 0");
  require(c.bs_position.x >= 0 && c.bs_position.x <= c.area_width_m, "bs_x_m",
          "base station must lie inside the area");
  require(c.bs_position.y >= 0 && c.bs_position.y <= c.area_height_m, "bs_y_m",
          "base station must lie inside the area");
  require(c.bs_height_m > 0, "bs_height_m", "must be > 0");
  require(c.device_height_m > 0, "device_height_m", "must be > 0");
  require(c.bandwidth_mhz > 0, "bandwidth_mhz", "must be > 0");
  require(c.carrier_ghz > 0, "carrier_ghz", "must be > 0");
  require(std::isfinite(c.tx_power_dbm), "tx_power_dbm", "must be finite");
  require(c.compute_units > 0, "compute_units", "must be > 0");
  require(c.ue_request_prob >= 0 && c.ue_request_prob <= 1, "ue_request_prob",
          "must lie in [0, 1]");
  require(c.ue_comm_mean_mbit > 0, "ue_comm_mean_mbit", "must be > 0");
  require(c.ue_comp_mean_units > 0, "ue_comp_mean_units", "must be > 0");
  require(c.sensor_interval_steps >= 1, "sensor_interval_steps", "must be >= 1");
  require(c.sensor_comm_mean_mbit > 0, "sensor_comm_mean_mbit", "must be > 0");
  require(c.sensor_comp_mean_units > 0, "sensor_comp_mean_units", "must be > 0");
  require(c.ue_speed_mps >= 0, "ue_speed_mps", "must be >= 0");
  require(c.step_duration_s > 0, "step_duration_s", "must be > 0");
  require(c.episode_length >= 1, "episode_length", "must be >= 1");
  require(std::isfinite(c.noise_dbm_per_hz), "noise_dbm_per_hz", "must be finite");
  require(c.pathloss_exponent > 0, "pathloss_exponent", "must be > 0");
  require(std::isfinite(c.reference_loss_db), "reference_loss_db", "must be finite");
  require(c.obs_norm_cap > 0, "obs_norm_cap", "must be > 0");
}

void validate(const RewardParams& p) {
  require(p.sync_discount > 0 && p.sync_discount < 1, "sync_discount", "must lie in (0, 1)");
  require(p.delay_penalty <= 0, "delay_penalty", "must be <= 0");
  require(p.delay_threshold_steps >= 0, "delay_threshold_steps", "must be >= 0");
  require(p.gamma >= 0 && p.gamma <= 1, "gamma", "must lie in [0, 1]");
  require(std::isfinite(p.sync_base), "sync_base", "must be finite");
}

ExperimentConfig load_config(std::string_view document) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(document));
  } catch (const YAML::Exception& e) {
    throw ConfigError("", std::string("config parse error: ") + e.what());
  }

  ExperimentConfig config;
  if (root.IsNull()) {
    validate(config.sim);
    validate(config.reward);
    return config;
  }
  if (!root.IsMap()) throw ConfigError("", "config must be a flat key-value mapping");

  std::map<std::string, const KeySpec*> by_name;
  for (const auto& spec : key_specs()) by_name.emplace(spec.name, &spec);

  std::vector<std::string> unknown;
  bool bs_x_given = false;
  bool bs_y_given = false;
  for (const auto& entry : root) {
    const auto key = entry.first.as<std::string>();
    auto it = by_name.find(key);
    if (it == by_name.end()) {
      unknown.push_back(key);
      continue;
    }
    it->second->read(config, entry.second);
    bs_x_given |= key == "bs_x_m";
    bs_y_given |= key == "bs_y_m";
  }
  if (!unknown.empty()) {
    std::string names;
    for (const auto& k : unknown) names += (names.empty() ? "" : ", ") + k;
    throw ConfigError(unknown.front(), "unknown config key(s): " + names);
  }
  // The base station sits at the area center unless placed explicitly.
  if (!bs_x_given) config.sim.bs_position.x = config.sim.area_width_m / 2.0;
  if (!bs_y_given) config.sim.bs_position.y = config.sim.area_height_m / 2.0;

  validate(config.sim);
  validate(config.reward);
  return config;
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot read config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return load_config(ss.str());
}

std::string to_text(const ExperimentConfig& config) {
  std::string out;
  for (const auto& spec : key_specs()) {
    out += spec.name;
    out += ": ";
    out += spec.write(config);
    out += '\n';
  }
  return out;
}

}  // namespace aoilab
