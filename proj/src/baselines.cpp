#include "mmw/baselines.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <vector>

namespace mmw::baselines {

Association associate_snr(const Matrix& rates) {
  validate_rates(rates);
  Association assoc;
  assoc.num_aps = rates.cols();
  assoc.ap.resize(rates.rows());
  for (Index i = 0; i < rates.rows(); ++i) {
    Index best = 0;
    for (Index j = 1; j < rates.cols(); ++j)
      if (rates(i, j) > rates(i, best)) best = j;
    assoc.ap[i] = static_cast<int>(best);
  }
  return assoc;
}

Association associate_greedy(const Topology& topo, const Matrix& rates) {
  validate_rates(rates);
  const Index n = rates.rows(), m = rates.cols();
  Association assoc;
  assoc.num_aps = m;
  assoc.ap = IndexVector::Constant(n, -1);
  Index unclaimed = n;
  while (unclaimed > 0) {
    bool progress = false;
    for (Index j = 0; j < m && unclaimed > 0; ++j) {
      Index pick = -1;
      double pick_dist = std::numeric_limits<double>::infinity();
      for (Index i = 0; i < n; ++i) {
        if (assoc.ap[i] >= 0 || !(rates(i, j) > 0.0)) continue;
        const double d = (topo.clients.row(i) - topo.aps.row(j)).norm();
        if (d < pick_dist) {
          pick_dist = d;
          pick = i;
        }
      }
      if (pick >= 0) {
        assoc.ap[pick] = static_cast<int>(j);
        --unclaimed;
        progress = true;
      }
    }
    if (!progress) break;
  }
  // Anyone no turn-taker could reach falls back to the strongest link.
  for (Index i = 0; i < n; ++i) {
    if (assoc.ap[i] >= 0) continue;
    Index best = 0;
    for (Index j = 1; j < m; ++j)
      if (rates(i, j) > rates(i, best)) best = j;
    assoc.ap[i] = static_cast<int>(best);
  }
  return assoc;
}

Association associate_minmax_load(const Matrix& rates, const Vector& lambda) {
  validate_rates(rates);
  if (lambda.size() != rates.rows()) throw std::invalid_argument("one demand per client required");
  const Index n = rates.rows(), m = rates.cols();

  // Hardest clients first: largest demand relative to their best rate.
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::vector<double> key(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) key[static_cast<std::size_t>(i)] = lambda[i] / rates.row(i).maxCoeff();
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return key[static_cast<std::size_t>(a)] > key[static_cast<std::size_t>(b)]; });

  Association assoc;
  assoc.num_aps = m;
  assoc.ap.resize(n);
  Vector utilisation = Vector::Zero(m);
  for (Index i : order) {
    Index best = -1;
    double best_util = std::numeric_limits<double>::infinity();
    for (Index j = 0; j < m; ++j) {
      if (!(rates(i, j) > 0.0)) continue;
      const double would_be = utilisation[j] + lambda[i] / rates(i, j);
      if (would_be < best_util) {
        best_util = would_be;
        best = j;
      }
    }
    assoc.ap[i] = static_cast<int>(best);
    utilisation[best] += lambda[i] / rates(i, best);
  }
  return assoc;
}

}  // namespace mmw::baselines
