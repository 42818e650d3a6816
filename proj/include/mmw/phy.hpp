#pragma once

#include <span>
#include <vector>

#include "mmw/topology.hpp"
#include "mmw/types.hpp"

namespace mmw::phy {

struct McsTier {
  double min_snr_db;
  double rate_bps;
};

/// Synthetic 8-tier table spanning 693 Mb/s to 6.756 Gb/s with thresholds
/// every `step_db` starting at `base_snr_db`. The per-tier sensitivities are
/// a configuration input, not standard-accurate values.
std::vector<McsTier> default_mcs_table(double base_snr_db = 2.0, double step_db = 3.0);

struct RadioConfig {
  double tx_power_dbm = 10.0;
  double antenna_gain_dbi = 15.0;  // per endpoint, boresight
  double carrier_hz = 60.48e9;
  double bandwidth_hz = 2.16e9;
  double noise_figure_db = 10.0;
  double min_distance_m = 0.1;  // floors the path-loss argument
  std::vector<McsTier> mcs_table = default_mcs_table();

  double noise_floor_dbm() const;
  void validate() const;
};

/// Free-space path loss 20 log10(4 pi d f / c), in dB.
double fspl_db(double distance_m, double frequency_hz);

struct LinkBudget {
  double snr_db = 0.0;
  bool distance_clamped = false;  // positions closer than min_distance_m
};

/// Link SNR from Friis propagation, both antenna gains at boresight and the
/// summed loss of every wall the segment strictly crosses.
LinkBudget link_snr(const Eigen::Vector2d& client, const Eigen::Vector2d& ap,
                    std::span<const Wall> walls, const RadioConfig& radio);

/// Best rate whose threshold is met; thresholds are closed lower bounds.
/// Returns 0 below the lowest tier (link infeasible).
double snr_to_rate(double snr_db, const RadioConfig& radio);

/// N x M achievable rates for every client-AP pair. Throws
/// InfeasibleInstanceError naming the client when some client is out of
/// coverage of every AP.
Matrix rate_matrix(const Topology& topo, const RadioConfig& radio);

}  // namespace mmw::phy
