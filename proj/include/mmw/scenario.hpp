#pragma once

#include <vector>

#include "mmw/rng.hpp"
#include "mmw/topology.hpp"
#include "mmw/types.hpp"

namespace mmw::scenario {

/// Evenly spaced rows x cols AP grid with half-cell margins, row-major from
/// the bottom-left.
Matrix grid_aps(double width, double height, int rows, int cols);

struct GaussianComponent {
  Eigen::Vector2d center;
  double sigma_m = 5.0;
  double weight = 1.0;
};

/// Client placement density: truncated Gaussian mixture plus a uniform floor
/// so the density is positive everywhere in the area.
struct PlacementPmf {
  std::vector<GaussianComponent> components;
  double floor_weight = 0.05;
};

/// n independent draws from the pmf, truncated to the area by resampling.
Matrix sample_clients_pmf(const PlacementPmf& pmf, double width, double height, int n, Rng& rng);

Matrix sample_clients_uniform(double width, double height, int n, Rng& rng);

struct MobilityParams {
  double speed_min_mps = 0.2;
  double speed_max_mps = 2.2;
  double pause_min_s = 1.0;
  double pause_max_s = 20.0;
  double walk_min_s = 1.0;
  double walk_max_s = 5.0;
  double horizon_s = 100.0;
  double snapshot_period_s = 10.0;
  double box_xmin = 7.0, box_xmax = 23.0;
  double box_ymin = 7.0, box_ymax = 16.0;

  void validate() const;
};

/// Random-waypoint trajectories sampled every snapshot_period_s. Each client
/// walks on an independent child stream of `rng`, so trajectories do not
/// depend on how many other clients exist. Returns one N x 2 position matrix
/// per snapshot (horizon / period snapshots, the initial state excluded).
std::vector<Matrix> random_waypoint(const Matrix& initial, const MobilityParams& params, const Rng& rng);

}  // namespace mmw::scenario
