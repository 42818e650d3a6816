#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace mmw {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using IndexVector = Eigen::VectorXi;
using Eigen::Index;

/// Relative tolerance used by every feasibility check in the library.
inline constexpr double kFeasTol = 1e-9;

/// Raised when an instance cannot be solved at all, e.g. a client with no
/// reachable AP. Carries the offending client index when there is one.
class InfeasibleInstanceError : public std::runtime_error {
 public:
  InfeasibleInstanceError(std::string msg, Index client = -1)
      : std::runtime_error(std::move(msg)), client_(client) {}
  Index client() const { return client_; }

 private:
  Index client_;
};

/// Raised when an allocation implies a zero (or negative) throughput for an
/// associated client. Solvers must never emit such allocations.
class DegenerateAllocationError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Super-frame timing of one AP. The data-transmission interval is what is
/// left of the beacon interval after beacons, beamforming training and
/// management overhead.
struct FrameConfig {
  double superframe_s = 0.1;
  double overhead_s = 0.01;

  double data_interval_s() const { return superframe_s - overhead_s; }
  /// h = (T - O) / T, the usable share of the super-frame.
  double efficiency() const { return data_interval_s() / superframe_s; }

  void validate() const {
    if (!(overhead_s > 0.0) || !(overhead_s < superframe_s))
      throw std::invalid_argument("FrameConfig requires 0 < overhead < superframe");
  }
};

inline std::vector<FrameConfig> uniform_frames(Index num_aps, FrameConfig f = {}) {
  f.validate();
  return std::vector<FrameConfig>(static_cast<std::size_t>(num_aps), f);
}

inline Vector efficiencies(std::span<const FrameConfig> frames) {
  Vector h(static_cast<Index>(frames.size()));
  for (Index j = 0; j < h.size(); ++j) h[j] = frames[static_cast<std::size_t>(j)].efficiency();
  return h;
}

/// Offered loads, one per client, or the distinguished backlogged marker.
class Demands {
 public:
  static Demands saturated() { return Demands(); }

  static Demands finite(Vector bits_per_s) {
    if ((bits_per_s.array() <= 0.0).any())
      throw std::invalid_argument("finite demands must be strictly positive");
    Demands d;
    d.values_ = std::move(bits_per_s);
    d.saturated_ = false;
    return d;
  }

  bool is_saturated() const { return saturated_; }

  const Vector& bits_per_s() const {
    if (saturated_) throw std::logic_error("saturated demands carry no load vector");
    return values_;
  }

 private:
  Demands() = default;
  Vector values_;
  bool saturated_ = true;
};

/// Integer association: exactly one AP per client, stored as the AP index of
/// each client. The N x M binary matrix view is available on demand.
struct Association {
  IndexVector ap;      // ap[i] = AP serving client i
  Index num_aps = 0;

  Index num_clients() const { return ap.size(); }

  Matrix to_matrix() const {
    Matrix x = Matrix::Zero(ap.size(), num_aps);
    for (Index i = 0; i < ap.size(); ++i) x(i, ap[i]) = 1.0;
    return x;
  }

  /// Clients served by each AP.
  IndexVector loads() const {
    IndexVector n = IndexVector::Zero(num_aps);
    for (Index i = 0; i < ap.size(); ++i) n[ap[i]] += 1;
    return n;
  }

  bool operator==(const Association& other) const {
    return num_aps == other.num_aps && ap.size() == other.ap.size() && (ap.array() == other.ap.array()).all();
  }
};

/// Rejects rate matrices with non-finite or negative entries, or with a
/// client that cannot reach any AP.
void validate_rates(const Matrix& rates);

/// Checks association invariants against a rate matrix: indices in range and
/// every assignment on a feasible (r > 0) link.
void validate_association(const Association& x, const Matrix& rates);

/// Checks the relaxed-association invariants: entries in [0, 1], row sums
/// <= 1 + tol, zero wherever the link is infeasible.
void validate_fractional(const Matrix& xf, const Matrix& rates, double tol = kFeasTol);

struct SolveReport {
  double utility_nats = 0.0;
  Vector per_client_throughput_bps;
  double aggregate_bps = 0.0;
  long iterations = 0;
  double wall_time_s = 0.0;
  std::string policy_name;
  std::uint64_t seed = 0;
};

}  // namespace mmw
