#pragma once

#include <vector>

#include "aoilab/config.hpp"

namespace aoilab {

/// Log-distance pathloss: PL(d) = reference_loss + 10 * exponent * log10(d).
struct PathLossModel {
  double reference_loss_db = 43.3;
  double exponent = 3.0;
};

struct LinkBudget {
  double distance_m = 0.0;
  double pathloss_db = 0.0;
  double rx_power_dbm = 0.0;
  double noise_power_dbm = 0.0;
  double snr = 0.0;
  double rate_mbps = 0.0;
};

/// Per-device bandwidth in MHz, indexed by device id within each class.
/// Inactive devices hold 0.
struct BandwidthAllocation {
  double ue_fraction = 0.0;
  std::vector<double> ue_mhz;
  std::vector<double> sensor_mhz;

  double total_mhz() const;
};

/// Distances below 1 m are clamped to 1 m.
double path_loss_db(double distance_m, const PathLossModel& model);

/// Shannon rate over the allocated band; noise = density + 10 log10(B[Hz]).
double data_rate(double bandwidth_mhz, double pathloss_db, double tx_power_dbm,
                 double noise_dbm_per_hz);

/// Full uplink budget for a device at `device` towards the BS, using the
/// 3D distance implied by the antenna heights.
LinkBudget link_budget(Vec2 device, double bandwidth_mhz, const SimConfig& config);

/// rho_c * total goes to the active UEs, the rest to the active sensors,
/// split equally within each class. A class with no active device leaves
/// its share unused.
BandwidthAllocation allocate_bandwidth(double rho_c, double total_mhz,
                                       const std::vector<bool>& active_ues,
                                       const std::vector<bool>& active_sensors);

}  // namespace aoilab
