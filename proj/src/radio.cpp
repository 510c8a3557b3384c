#include "aoilab/radio.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace aoilab {
namespace {

std::vector<double> equal_share(double pool, const std::vector<bool>& active) {
  std::vector<double> out(active.size(), 0.0);
  const auto n = std::count(active.begin(), active.end(), true);
  if (n == 0) return out;
  const double each = pool / static_cast<double>(n);
  for (std::size_t i = 0; i < active.size(); ++i) {
    if (active[i]) out[i] = each;
  }
  return out;
}

}  // namespace

double BandwidthAllocation::total_mhz() const {
  return std::accumulate(ue_mhz.begin(), ue_mhz.end(), 0.0) +
         std::accumulate(sensor_mhz.begin(), sensor_mhz.end(), 0.0);
}

double path_loss_db(double distance_m, const PathLossModel& model) {
  const double d = std::max(distance_m, 1.0);
  return model.reference_loss_db + 10.0 * model.exponent * std::log10(d);
}

double data_rate(double bandwidth_mhz, double pathloss_db, double tx_power_dbm,
                 double noise_dbm_per_hz) {
  if (bandwidth_mhz <= 0.0) return 0.0;
  const double noise_dbm = noise_dbm_per_hz + 10.0 * std::log10(bandwidth_mhz * 1e6);
  const double snr_db = tx_power_dbm - pathloss_db - noise_dbm;
  const double snr = std::pow(10.0, snr_db / 10.0);
  return bandwidth_mhz * std::log2(1.0 + snr);
}

LinkBudget link_budget(Vec2 device, double bandwidth_mhz, const SimConfig& c) {
  LinkBudget lb;
  const double horizontal = distance(device, c.bs_position);
  const double dh = c.bs_height_m - c.device_height_m;
  lb.distance_m = std::sqrt(horizontal * horizontal + dh * dh);
  lb.pathloss_db = path_loss_db(lb.distance_m, {c.reference_loss_db, c.pathloss_exponent});
  lb.rx_power_dbm = c.tx_power_dbm - lb.pathloss_db;
  if (bandwidth_mhz > 0.0) {
    lb.noise_power_dbm = c.noise_dbm_per_hz + 10.0 * std::log10(bandwidth_mhz * 1e6);
    lb.snr = std::pow(10.0, (lb.rx_power_dbm - lb.noise_power_dbm) / 10.0);
  }
  lb.rate_mbps = data_rate(bandwidth_mhz, lb.pathloss_db, c.tx_power_dbm, c.noise_dbm_per_hz);
  return lb;
}

BandwidthAllocation allocate_bandwidth(double rho_c, double total_mhz,
                                       const std::vector<bool>& active_ues,
                                       const std::vector<bool>& active_sensors) {
  rho_c = std::clamp(rho_c, 0.0, 1.0);
  BandwidthAllocation a;
  a.ue_fraction = rho_c;
  a.ue_mhz = equal_share(rho_c * total_mhz, active_ues);
  a.sensor_mhz = equal_share((1.0 - rho_c) * total_mhz, active_sensors);
  return a;
}

}  // namespace aoilab
