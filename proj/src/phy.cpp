#include "mmw/phy.hpp"

#include <cmath>
#include <string>

namespace mmw::phy {

namespace {
constexpr double kSpeedOfLight = 299792458.0;
}

std::vector<McsTier> default_mcs_table(double base_snr_db, double step_db) {
  // Eight tiers from the lowest to the highest single-link PHY rate.
  const double rates[] = {693e6, 1386e6, 2079e6, 2772e6, 3465e6, 4158e6, 5197.5e6, 6.756e9};
  std::vector<McsTier> table;
  table.reserve(8);
  for (int k = 0; k < 8; ++k) table.push_back({base_snr_db + k * step_db, rates[k]});
  return table;
}

double RadioConfig::noise_floor_dbm() const {
  return -174.0 + 10.0 * std::log10(bandwidth_hz) + noise_figure_db;
}

void RadioConfig::validate() const {
  if (carrier_hz <= 0.0 || bandwidth_hz <= 0.0)
    throw std::invalid_argument("carrier and bandwidth must be positive");
  if (min_distance_m <= 0.0) throw std::invalid_argument("min distance must be positive");
  if (mcs_table.empty()) throw std::invalid_argument("MCS table is empty");
  for (std::size_t k = 1; k < mcs_table.size(); ++k) {
    if (!(mcs_table[k].min_snr_db > mcs_table[k - 1].min_snr_db) ||
        !(mcs_table[k].rate_bps > mcs_table[k - 1].rate_bps))
      throw std::invalid_argument("MCS table must be strictly increasing in SNR and rate");
  }
  if (mcs_table.front().rate_bps <= 0.0) throw std::invalid_argument("MCS rates must be positive");
}

double fspl_db(double distance_m, double frequency_hz) {
  return 20.0 * std::log10(4.0 * M_PI * distance_m * frequency_hz / kSpeedOfLight);
}

LinkBudget link_snr(const Eigen::Vector2d& client, const Eigen::Vector2d& ap,
                    std::span<const Wall> walls, const RadioConfig& radio) {
  LinkBudget budget;
  double d = (client - ap).norm();
  if (d < radio.min_distance_m) {
    d = radio.min_distance_m;
    budget.distance_clamped = true;
  }
  double snr = radio.tx_power_dbm + 2.0 * radio.antenna_gain_dbi - fspl_db(d, radio.carrier_hz) -
               radio.noise_floor_dbm();
  for (const Wall& w : walls) {
    if (crosses_wall(client, ap, w)) snr -= w.attenuation_db;
  }
  budget.snr_db = snr;
  return budget;
}

double snr_to_rate(double snr_db, const RadioConfig& radio) {
  double rate = 0.0;
  for (const McsTier& tier : radio.mcs_table) {
    if (snr_db >= tier.min_snr_db)
      rate = tier.rate_bps;
    else
      break;
  }
  return rate;
}

Matrix rate_matrix(const Topology& topo, const RadioConfig& radio) {
  topo.validate();
  radio.validate();
  Matrix rates(topo.num_clients(), topo.num_aps());
  for (Index i = 0; i < topo.num_clients(); ++i) {
    for (Index j = 0; j < topo.num_aps(); ++j) {
      const LinkBudget budget =
          link_snr(topo.clients.row(i), topo.aps.row(j), topo.walls, radio);
      rates(i, j) = snr_to_rate(budget.snr_db, radio);
    }
    if ((rates.row(i).array() > 0.0).count() == 0)
      throw InfeasibleInstanceError("client " + std::to_string(i) + " is out of coverage", i);
  }
  return rates;
}

}  // namespace mmw::phy
