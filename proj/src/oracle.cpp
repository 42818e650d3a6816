#include "mmw/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "mmw/core.hpp"
#include "mmw/loadsolve.hpp"
#include "mmw/satsolve.hpp"

namespace mmw::oracle {

namespace {

std::vector<std::vector<Index>> feasible_lists(const Matrix& rates) {
  std::vector<std::vector<Index>> feasible(static_cast<std::size_t>(rates.rows()));
  for (Index i = 0; i < rates.rows(); ++i)
    for (Index j = 0; j < rates.cols(); ++j)
      if (rates(i, j) > 0.0) feasible[static_cast<std::size_t>(i)].push_back(j);
  return feasible;
}

void guard_size(double candidates, double max_candidates) {
  if (candidates > max_candidates)
    throw SearchSpaceTooLarge("exhaustive search space of " + std::to_string(candidates) +
                                  " candidates exceeds the cap of " + std::to_string(max_candidates),
                              candidates);
}

/// Mixed-radix odometer over per-client feasible-AP lists, visiting
/// associations in lexicographic order. apply(i, j_old, j_new) is invoked for
/// every digit transition, including the resets of a carry.
class Odometer {
 public:
  explicit Odometer(const std::vector<std::vector<Index>>& lists) : lists_(lists) {
    digits_.assign(lists.size(), 0);
  }

  Index ap_of(std::size_t i) const { return lists_[i][static_cast<std::size_t>(digits_[i])]; }
  const std::vector<int>& digits() const { return digits_; }

  template <typename ChangeFn>
  bool advance(ChangeFn&& apply) {
    for (std::size_t pos = lists_.size(); pos-- > 0;) {
      const auto& list = lists_[pos];
      if (digits_[pos] + 1 < static_cast<int>(list.size())) {
        apply(static_cast<Index>(pos), list[static_cast<std::size_t>(digits_[pos])],
              list[static_cast<std::size_t>(digits_[pos] + 1)]);
        ++digits_[pos];
        return true;
      }
      apply(static_cast<Index>(pos), list[static_cast<std::size_t>(digits_[pos])], list[0]);
      digits_[pos] = 0;
    }
    return false;
  }

 private:
  const std::vector<std::vector<Index>>& lists_;
  std::vector<int> digits_;
};

Association digits_to_association(const std::vector<std::vector<Index>>& lists,
                                  const std::vector<int>& digits, Index num_aps) {
  Association x;
  x.num_aps = num_aps;
  x.ap.resize(static_cast<Index>(lists.size()));
  for (std::size_t i = 0; i < lists.size(); ++i)
    x.ap[static_cast<Index>(i)] = static_cast<int>(lists[i][static_cast<std::size_t>(digits[i])]);
  return x;
}

}  // namespace

double search_space_size(const Matrix& rates) {
  double product = 1.0;
  for (Index i = 0; i < rates.rows(); ++i)
    product *= static_cast<double>((rates.row(i).array() > 0.0).count());
  return product;
}

SaturationOptimum exhaustive_saturation(const Matrix& rates, std::span<const FrameConfig> frames,
                                        double max_candidates) {
  validate_rates(rates);
  const Index n = rates.rows(), m = rates.cols();
  const auto lists = feasible_lists(rates);
  const double candidates = search_space_size(rates);
  guard_size(candidates, max_candidates);

  // Per-pair log terms and the n log n occupancy table keep each candidate O(1).
  Matrix log_hr = Matrix::Zero(n, m);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < m; ++j)
      if (rates(i, j) > 0.0)
        log_hr(i, j) = std::log(frames[static_cast<std::size_t>(j)].efficiency() * rates(i, j));
  std::vector<double> nlogn(static_cast<std::size_t>(n) + 1, 0.0);
  for (Index k = 2; k <= n; ++k)
    nlogn[static_cast<std::size_t>(k)] = static_cast<double>(k) * std::log(static_cast<double>(k));

  Odometer odo(lists);
  std::vector<Index> loads(static_cast<std::size_t>(m), 0);
  double sum_log = 0.0, sum_nlogn = 0.0;
  auto rebuild = [&] {
    std::fill(loads.begin(), loads.end(), Index{0});
    sum_log = 0.0;
    for (std::size_t i = 0; i < lists.size(); ++i) {
      const Index j = odo.ap_of(i);
      ++loads[static_cast<std::size_t>(j)];
      sum_log += log_hr(static_cast<Index>(i), j);
    }
    sum_nlogn = 0.0;
    for (Index j = 0; j < m; ++j) sum_nlogn += nlogn[static_cast<std::size_t>(loads[static_cast<std::size_t>(j)])];
  };
  rebuild();

  double best_scan = -std::numeric_limits<double>::infinity();
  std::vector<int> best_digits = odo.digits();
  std::uint64_t visited = 0;
  const auto apply = [&](Index i, Index j_old, Index j_new) {
    sum_log += log_hr(i, j_new) - log_hr(i, j_old);
    auto& lo = loads[static_cast<std::size_t>(j_old)];
    auto& ln = loads[static_cast<std::size_t>(j_new)];
    sum_nlogn += nlogn[static_cast<std::size_t>(lo - 1)] - nlogn[static_cast<std::size_t>(lo)];
    --lo;
    sum_nlogn += nlogn[static_cast<std::size_t>(ln + 1)] - nlogn[static_cast<std::size_t>(ln)];
    ++ln;
  };
  while (true) {
    const double u = sum_log - sum_nlogn;
    if (u > best_scan) {
      best_scan = u;
      best_digits = odo.digits();
    }
    ++visited;
    if ((visited & 0xffff) == 0) rebuild();  // bound incremental fp drift
    if (!odo.advance(apply)) break;
  }

  SaturationOptimum opt;
  opt.x = digits_to_association(lists, best_digits, m);
  const Matrix t = equal_airtime(opt.x, frames);
  opt.utility = utility(throughput(opt.x, t, rates, frames));
  opt.candidates = candidates;
  return opt;
}

FiniteOptimum exhaustive_finite(const Matrix& rates, std::span<const FrameConfig> frames,
                                const Vector& lambda_bps, double max_candidates) {
  validate_rates(rates);
  if (lambda_bps.size() != rates.rows()) throw std::invalid_argument("one demand per client required");
  const Index n = rates.rows(), m = rates.cols();
  const auto lists = feasible_lists(rates);
  const double candidates = search_space_size(rates);
  guard_size(candidates, max_candidates);

  Matrix required = Matrix::Zero(n, m);  // airtime fraction meeting the demand
  Matrix log_hr = Matrix::Zero(n, m);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < m; ++j)
      if (rates(i, j) > 0.0) {
        const double h = frames[static_cast<std::size_t>(j)].efficiency();
        required(i, j) = lambda_bps[i] / (h * rates(i, j));
        log_hr(i, j) = std::log(h * rates(i, j));
      }
  Vector log_lambda(n);
  for (Index i = 0; i < n; ++i) log_lambda[i] = std::log(lambda_bps[i]);

  Odometer odo(lists);
  std::vector<Index> assoc(static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < static_cast<std::size_t>(n); ++i) assoc[i] = odo.ap_of(i);

  // Water-fill one AP and return its utility contribution.
  std::vector<double> member_demand;
  std::vector<Index> member_id;
  const auto fill_ap = [&](Index j) {
    member_demand.clear();
    member_id.clear();
    for (Index i = 0; i < n; ++i)
      if (assoc[static_cast<std::size_t>(i)] == j) {
        member_demand.push_back(required(i, j));
        member_id.push_back(i);
      }
    if (member_id.empty()) return 0.0;
    // insertion sort keeps ids aligned; member counts are tiny
    for (std::size_t a = 1; a < member_demand.size(); ++a) {
      const double d = member_demand[a];
      const Index id = member_id[a];
      std::size_t b = a;
      for (; b > 0 && member_demand[b - 1] > d; --b) {
        member_demand[b] = member_demand[b - 1];
        member_id[b] = member_id[b - 1];
      }
      member_demand[b] = d;
      member_id[b] = id;
    }
    double budget = 1.0, contribution = 0.0;
    for (std::size_t k = 0; k < member_demand.size(); ++k) {
      const double fair = budget / static_cast<double>(member_demand.size() - k);
      if (member_demand[k] <= fair) {
        contribution += log_lambda[member_id[k]];
        budget -= member_demand[k];
      } else {
        const double log_fair = std::log(fair);
        for (std::size_t rest = k; rest < member_demand.size(); ++rest)
          contribution += log_fair + log_hr(member_id[rest], j);
        break;
      }
    }
    return contribution;
  };

  std::vector<double> ap_utility(static_cast<std::size_t>(m), 0.0);
  for (Index j = 0; j < m; ++j) ap_utility[static_cast<std::size_t>(j)] = fill_ap(j);

  double best_scan = -std::numeric_limits<double>::infinity();
  std::vector<int> best_digits = odo.digits();
  const auto apply = [&](Index i, Index j_old, Index j_new) {
    assoc[static_cast<std::size_t>(i)] = j_new;
    ap_utility[static_cast<std::size_t>(j_old)] = fill_ap(j_old);
    ap_utility[static_cast<std::size_t>(j_new)] = fill_ap(j_new);
  };
  while (true) {
    double u = 0.0;
    for (Index j = 0; j < m; ++j) u += ap_utility[static_cast<std::size_t>(j)];
    if (u > best_scan) {
      best_scan = u;
      best_digits = odo.digits();
    }
    if (!odo.advance(apply)) break;
  }

  FiniteOptimum opt;
  opt.x = digits_to_association(lists, best_digits, m);
  opt.t = loadsolve::water_filling(opt.x, rates, frames, lambda_bps);
  opt.utility = loadsolve::finite_utility(opt.x, opt.t, rates, frames);
  opt.candidates = candidates;
  return opt;
}

double gradient_check(const Matrix& xf, const Matrix& rates, std::span<const FrameConfig> frames) {
  const Matrix analytic = satsolve::relaxed_utility_gradient(xf, rates, frames);
  constexpr double h = 1e-6;
  double worst = 0.0;
  Matrix probe = xf;
  for (Index i = 0; i < xf.rows(); ++i) {
    for (Index j = 0; j < xf.cols(); ++j) {
      if (!(rates(i, j) > 0.0)) continue;
      const double saved = probe(i, j);
      probe(i, j) = saved + h;
      const double up = satsolve::relaxed_utility(probe, rates, frames);
      probe(i, j) = saved - h;
      const double down = satsolve::relaxed_utility(probe, rates, frames);
      probe(i, j) = saved;
      const double fd = (up - down) / (2.0 * h);
      const double denom = std::max(std::abs(analytic(i, j)), 1e-8);
      worst = std::max(worst, std::abs(fd - analytic(i, j)) / denom);
    }
  }
  return worst;
}

}  // namespace mmw::oracle
