#include "mmw/scenario.hpp"

#include <cmath>
#include <stdexcept>

namespace mmw::scenario {

Matrix grid_aps(double width, double height, int rows, int cols) {
  if (rows < 1 || cols < 1) throw std::invalid_argument("AP grid needs at least one row and column");
  Matrix aps(static_cast<Index>(rows) * cols, 2);
  Index k = 0;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c, ++k) {
      aps(k, 0) = width * (2.0 * c + 1.0) / (2.0 * cols);
      aps(k, 1) = height * (2.0 * r + 1.0) / (2.0 * rows);
    }
  }
  return aps;
}

Matrix sample_clients_uniform(double width, double height, int n, Rng& rng) {
  Matrix pts(n, 2);
  for (int i = 0; i < n; ++i) {
    pts(i, 0) = rng.uniform(0.0, width);
    pts(i, 1) = rng.uniform(0.0, height);
  }
  return pts;
}

Matrix sample_clients_pmf(const PlacementPmf& pmf, double width, double height, int n, Rng& rng) {
  if (pmf.floor_weight < 0.0 || pmf.floor_weight > 1.0)
    throw std::invalid_argument("floor weight must lie in [0, 1]");
  double total = 0.0;
  for (const auto& c : pmf.components) {
    if (c.sigma_m <= 0.0 || c.weight < 0.0)
      throw std::invalid_argument("pmf components need sigma > 0 and weight >= 0");
    total += c.weight;
  }
  const bool uniform_only = pmf.components.empty() || total == 0.0;

  Matrix pts(n, 2);
  for (int i = 0; i < n; ++i) {
    if (uniform_only || rng.uniform() < pmf.floor_weight) {
      pts(i, 0) = rng.uniform(0.0, width);
      pts(i, 1) = rng.uniform(0.0, height);
      continue;
    }
    // Pick a mixture component, then draw until the point lands in the area.
    double pick = rng.uniform() * total;
    std::size_t k = 0;
    for (; k + 1 < pmf.components.size(); ++k) {
      pick -= pmf.components[k].weight;
      if (pick < 0.0) break;
    }
    const GaussianComponent& comp = pmf.components[k];
    double x, y;
    do {
      x = comp.center.x() + comp.sigma_m * rng.normal();
      y = comp.center.y() + comp.sigma_m * rng.normal();
    } while (x < 0.0 || x > width || y < 0.0 || y > height);
    pts(i, 0) = x;
    pts(i, 1) = y;
  }
  return pts;
}

void MobilityParams::validate() const {
  auto range_ok = [](double lo, double hi) { return lo > 0.0 && lo <= hi; };
  if (!range_ok(speed_min_mps, speed_max_mps) || !range_ok(pause_min_s, pause_max_s) ||
      !range_ok(walk_min_s, walk_max_s))
    throw std::invalid_argument("mobility ranges must be positive with min <= max");
  if (horizon_s <= 0.0 || snapshot_period_s <= 0.0 || snapshot_period_s > horizon_s)
    throw std::invalid_argument("mobility horizon/period invalid");
  if (box_xmin >= box_xmax || box_ymin >= box_ymax)
    throw std::invalid_argument("mobility box is empty");
}

std::vector<Matrix> random_waypoint(const Matrix& initial, const MobilityParams& params,
                                    const Rng& rng) {
  params.validate();
  const Index n = initial.rows();
  for (Index i = 0; i < n; ++i) {
    if (initial(i, 0) < params.box_xmin || initial(i, 0) > params.box_xmax ||
        initial(i, 1) < params.box_ymin || initial(i, 1) > params.box_ymax)
      throw std::invalid_argument("initial position outside the movement box");
  }
  const int num_snapshots = static_cast<int>(std::floor(params.horizon_s / params.snapshot_period_s + 1e-9));
  std::vector<Matrix> snapshots(static_cast<std::size_t>(num_snapshots), Matrix(n, 2));

  for (Index i = 0; i < n; ++i) {
    Rng walker = rng.fork(static_cast<std::uint64_t>(i));
    Eigen::Vector2d pos = initial.row(i);
    double t = 0.0;
    int next = 0;  // next snapshot index to emit
    bool pausing = true;
    while (next < num_snapshots) {
      if (pausing) {
        const double dur = walker.uniform(params.pause_min_s, params.pause_max_s);
        while (next < num_snapshots) {
          const double st = (next + 1) * params.snapshot_period_s;
          if (st > t + dur) break;
          snapshots[static_cast<std::size_t>(next)].row(i) = pos;
          ++next;
        }
        t += dur;
      } else {
        const double dur = walker.uniform(params.walk_min_s, params.walk_max_s);
        const Eigen::Vector2d waypoint(walker.uniform(params.box_xmin, params.box_xmax),
                                       walker.uniform(params.box_ymin, params.box_ymax));
        const double speed = walker.uniform(params.speed_min_mps, params.speed_max_mps);
        const double dist = (waypoint - pos).norm();
        const double travel = dist > 0.0 ? std::min(dur, dist / speed) : 0.0;
        const Eigen::Vector2d dir = dist > 0.0 ? ((waypoint - pos) / dist).eval() : Eigen::Vector2d::Zero().eval();
        while (next < num_snapshots) {
          const double st = (next + 1) * params.snapshot_period_s;
          if (st > t + dur) break;
          const double moved = speed * std::min(st - t, travel);
          snapshots[static_cast<std::size_t>(next)].row(i) = pos + dir * moved;
          ++next;
        }
        pos += dir * (speed * travel);
        t += dur;
      }
      pausing = !pausing;
    }
  }
  return snapshots;
}

}  // namespace mmw::scenario
