#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mmw/rng.hpp"
#include "mmw/types.hpp"

namespace mmw::loadsolve {

struct SAParams {
  double t0 = 20.0;
  double alpha = 0.7;
  double tmin = 0.001;
  double p = 0.1;      // probability of a purely random move
  int q = -1;          // inner moves per temperature; <0 means ceil(NM/2)
  std::uint64_t seed = 0;

  void validate() const;
  int resolve_q(Index n, Index m) const;
};

/// Data-interval fraction whose throughput equals the offered load exactly:
/// t = lambda / (h_j r). Values above 1 are legal and mean the demand
/// exceeds what the AP can serve alone.
double required_airtime(double lambda_bps, double rate_bps, double efficiency);

/// Per-AP max-min allocation of the unit data interval under per-client
/// demand caps: t_i = min(d_i, level) with the water level chosen so the
/// budget is exhausted, or everyone capped when the demands all fit.
Matrix water_filling(const Association& x, const Matrix& rates,
                     std::span<const FrameConfig> frames, const Vector& lambda_bps);

/// U = sum ln(t h r) over associated pairs. Throws on zero airtime.
double finite_utility(const Association& x, const Matrix& t, const Matrix& rates,
                      std::span<const FrameConfig> frames);

/// Per-AP bottleneck metrics. The airtime slack is expressed in bits/s by
/// scaling with the mean rate of the AP's clients so both terms of B share
/// units; only the sign and relative order of B feed the perturbation.
struct BottleneckReport {
  Vector load_deficit_bps;   // unmet offered load per AP, >= 0
  Vector time_slack_bps;     // unused data interval, rate-scaled
  Vector b;                  // deficit minus slack
  std::vector<Index> negative;     // APs with B < 0 (have headroom)
  std::vector<Index> nonnegative;  // bottleneck APs, B >= 0
};

BottleneckReport bottlenecks(const Association& x, const Matrix& t, const Matrix& rates,
                             std::span<const FrameConfig> frames, const Vector& lambda_bps);

/// One-client move: random reassociation with probability p, otherwise a
/// bottleneck-offloading move. Returns the input unchanged when no legal
/// move is found within 64 resampling attempts.
Association perturbate(const Association& x, const Matrix& t, const Matrix& rates,
                       std::span<const FrameConfig> frames, const Vector& lambda_bps,
                       double p, Rng& rng);

struct SATraceRow {
  long iteration;
  double temperature;
  double utility;
  bool accepted;
};

struct SAResult {
  Association x;
  Matrix t;
  SolveReport report;
};

/// Annealing over associations with water-filled airtimes as the energy.
/// Exits early as soon as every client's throughput matches its demand, and
/// otherwise returns the best association seen.
SAResult simulated_annealing(const Association& x0, const Matrix& rates,
                             std::span<const FrameConfig> frames, const Vector& lambda_bps,
                             const SAParams& params, std::vector<SATraceRow>* trace = nullptr);

/// Independent annealing restarts with distinct seeds, combined by best
/// utility (ties to the earliest seed). Restarts run concurrently when
/// threads > 1; the result does not depend on the thread count.
SAResult best_of_restarts(const Association& x0, const Matrix& rates,
                          std::span<const FrameConfig> frames, const Vector& lambda_bps,
                          const SAParams& params, std::span<const std::uint64_t> seeds,
                          int threads = 1);

}  // namespace mmw::loadsolve
