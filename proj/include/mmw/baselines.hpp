#pragma once

#include "mmw/topology.hpp"
#include "mmw/types.hpp"

namespace mmw::baselines {

/// Strongest-link association: each client picks its best-rate AP, ties to
/// the lowest AP index.
Association associate_snr(const Matrix& rates);

/// APs take turns in index order, each claiming its nearest unassociated
/// reachable client. Clients no turn-taker can reach fall back to their
/// best-rate AP.
Association associate_greedy(const Topology& topo, const Matrix& rates);

/// Load-balancing stand-in for distributed min-max association: clients in
/// decreasing lambda / best-rate order, each placed on the feasible AP whose
/// utilisation sum(lambda / r) stays smallest. Saturation mode passes a
/// uniform lambda.
Association associate_minmax_load(const Matrix& rates, const Vector& lambda);

}  // namespace mmw::baselines
