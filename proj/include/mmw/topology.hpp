#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

#include "mmw/types.hpp"

namespace mmw {

/// Straight wall segment with a flat penetration loss.
struct Wall {
  Eigen::Vector2d a;
  Eigen::Vector2d b;
  double attenuation_db = 0.0;

  void validate() const {
    if (attenuation_db < 0.0) throw std::invalid_argument("wall attenuation must be >= 0");
    if ((a - b).norm() == 0.0) throw std::invalid_argument("wall endpoints must be distinct");
  }
};

/// True when segment pq strictly crosses the wall segment. Touching an
/// endpoint or running collinear does not count as a crossing.
bool crosses_wall(const Eigen::Vector2d& p, const Eigen::Vector2d& q, const Wall& w);

/// Geometric ground truth of one deployment. Positions are row-wise 2D
/// points in metres; clients are rows of `clients`, APs rows of `aps`.
struct Topology {
  double width = 0.0;
  double height = 0.0;
  Matrix aps;      // M x 2
  Matrix clients;  // N x 2
  std::vector<Wall> walls;

  Index num_aps() const { return aps.rows(); }
  Index num_clients() const { return clients.rows(); }

  void validate() const;
};

void write_topology_csv(const std::string& path, const Topology& topo);
Topology read_topology_csv(const std::string& path);

}  // namespace mmw
