#pragma once

#include <span>
#include <vector>

#include "mmw/types.hpp"

namespace mmw {

/// Proportional-fair split under saturation: every client of AP j receives
/// 1/n_j of the data-transmission interval. Entries are fractions of that
/// interval; multiply by (T_j - O_j) for absolute seconds.
Matrix equal_airtime(const Association& x, std::span<const FrameConfig> frames);

/// Per-client throughput S_i = t_{i,j} * h_j * r_{i,j} on the associated AP.
Vector throughput(const Association& x, const Matrix& t, const Matrix& rates,
                  std::span<const FrameConfig> frames);

/// Log-utility U = sum_i ln S_i, in nats. Throws DegenerateAllocationError
/// if any throughput is not strictly positive.
double utility(const Vector& throughput_bps);

/// Printing-only variant that floors each throughput at 1 bit/s instead of
/// throwing. Never used inside a solver.
double diagnostic_utility(const Vector& throughput_bps);

struct FeasibilityReport {
  std::vector<Index> airtime_violations;  // APs with column airtime > 1 + tol
  std::vector<Index> load_violations;     // clients served above their demand
  bool feasible() const { return airtime_violations.empty() && load_violations.empty(); }
};

/// Flags the finite-load constraints: per AP the allocated airtime fractions
/// must fit the unit data interval, and no client may be served above its
/// offered load.
FeasibilityReport check_finite_load_feasibility(const Association& x, const Matrix& t,
                                                const Matrix& rates,
                                                std::span<const FrameConfig> frames,
                                                const Vector& lambda_bps);

}  // namespace mmw
