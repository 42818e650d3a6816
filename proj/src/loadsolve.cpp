#include "mmw/loadsolve.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <numeric>
#include <thread>

#include "mmw/core.hpp"

namespace mmw::loadsolve {

void SAParams::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("SA alpha must be in (0, 1)");
  if (p < 0.0 || p > 1.0) throw std::invalid_argument("SA p must be in [0, 1]");
  if (!(tmin > 0.0) || !(tmin < t0)) throw std::invalid_argument("SA requires 0 < Tmin < T0");
}

int SAParams::resolve_q(Index n, Index m) const {
  if (q > 0) return q;
  return static_cast<int>((n * m + 1) / 2);
}

double required_airtime(double lambda_bps, double rate_bps, double efficiency) {
  if (!(rate_bps > 0.0))
    throw InfeasibleInstanceError("required airtime asked for an infeasible link");
  return lambda_bps / (efficiency * rate_bps);
}

Matrix water_filling(const Association& x, const Matrix& rates,
                     std::span<const FrameConfig> frames, const Vector& lambda_bps) {
  if (lambda_bps.size() != x.num_clients())
    throw std::invalid_argument("one demand per client required");
  Matrix t = Matrix::Zero(x.num_clients(), x.num_aps);
  std::vector<std::pair<double, Index>> demands;  // (required fraction, client)
  for (Index j = 0; j < x.num_aps; ++j) {
    demands.clear();
    const double h = frames[static_cast<std::size_t>(j)].efficiency();
    for (Index i = 0; i < x.num_clients(); ++i) {
      if (x.ap[i] == j) demands.emplace_back(required_airtime(lambda_bps[i], rates(i, j), h), i);
    }
    if (demands.empty()) continue;
    std::sort(demands.begin(), demands.end());
    // Progressive filling: satisfy the easiest requests while they fit the
    // equal share of what is left; the rest split the residual equally.
    double budget = 1.0;
    std::size_t k = 0;
    for (; k < demands.size(); ++k) {
      const double fair = budget / static_cast<double>(demands.size() - k);
      if (demands[k].first <= fair) {
        t(demands[k].second, j) = demands[k].first;
        budget -= demands[k].first;
      } else {
        for (std::size_t rest = k; rest < demands.size(); ++rest)
          t(demands[rest].second, j) = fair;
        break;
      }
    }
  }
  return t;
}

double finite_utility(const Association& x, const Matrix& t, const Matrix& rates,
                      std::span<const FrameConfig> frames) {
  double u = 0.0;
  for (Index i = 0; i < x.num_clients(); ++i) {
    const Index j = x.ap[i];
    const double airtime = t(i, j);
    if (!(airtime > 0.0))
      throw DegenerateAllocationError("client " + std::to_string(i) + " has zero airtime");
    u += std::log(airtime * frames[static_cast<std::size_t>(j)].efficiency() * rates(i, j));
  }
  return u;
}

BottleneckReport bottlenecks(const Association& x, const Matrix& t, const Matrix& rates,
                             std::span<const FrameConfig> frames, const Vector& lambda_bps) {
  const Index m = x.num_aps, n = x.num_clients();
  BottleneckReport report;
  report.load_deficit_bps = Vector::Zero(m);
  report.time_slack_bps = Vector::Zero(m);
  report.b = Vector::Zero(m);
  for (Index j = 0; j < m; ++j) {
    const double h = frames[static_cast<std::size_t>(j)].efficiency();
    double requested = 0.0, served = 0.0, used = 0.0, rate_sum = 0.0;
    Index members = 0;
    for (Index i = 0; i < n; ++i) {
      if (x.ap[i] != j) continue;
      requested += lambda_bps[i];
      served += t(i, j) * h * rates(i, j);
      used += t(i, j);
      rate_sum += rates(i, j);
      ++members;
    }
    double mean_rate;
    if (members > 0) {
      mean_rate = rate_sum / static_cast<double>(members);
    } else {
      // Idle AP: rate scale taken over the clients that could reach it.
      Index reachable = 0;
      for (Index i = 0; i < n; ++i)
        if (rates(i, j) > 0.0) {
          rate_sum += rates(i, j);
          ++reachable;
        }
      mean_rate = reachable > 0 ? rate_sum / static_cast<double>(reachable) : 0.0;
    }
    double deficit = requested - served;
    if (deficit <= kFeasTol * std::max(requested, 1.0)) deficit = 0.0;
    const double slack_frac = used >= 1.0 - 1e-12 ? 0.0 : 1.0 - used;
    report.load_deficit_bps[j] = deficit;
    report.time_slack_bps[j] = slack_frac * h * mean_rate;
    report.b[j] = report.load_deficit_bps[j] - report.time_slack_bps[j];
    if (report.b[j] < 0.0)
      report.negative.push_back(j);
    else
      report.nonnegative.push_back(j);
  }
  return report;
}

namespace {
constexpr int kMoveAttempts = 64;
}

Association perturbate(const Association& x, const Matrix& t, const Matrix& rates,
                       std::span<const FrameConfig> frames, const Vector& lambda_bps, double p,
                       Rng& rng) {
  const Index n = x.num_clients(), m = x.num_aps;
  Association moved = x;
  if (m < 2 || n < 1) return moved;

  if (rng.uniform() < p) {
    // Unconstrained random move keeps every association reachable.
    for (int attempt = 0; attempt < kMoveAttempts; ++attempt) {
      const Index i = static_cast<Index>(rng.uniform_int(0, n - 1));
      const Index j = static_cast<Index>(rng.uniform_int(0, m - 1));
      if (j != x.ap[i] && rates(i, j) > 0.0) {
        moved.ap[i] = static_cast<int>(j);
        return moved;
      }
    }
    return moved;
  }

  const BottleneckReport report = bottlenecks(x, t, rates, frames, lambda_bps);
  if (!report.negative.empty()) {
    // Offload a bottleneck: someone on a B+ AP moves to a reachable B- AP.
    for (int attempt = 0; attempt < kMoveAttempts; ++attempt) {
      const Index i = static_cast<Index>(rng.uniform_int(0, n - 1));
      const Index j = report.negative[static_cast<std::size_t>(
          rng.uniform_int(0, static_cast<std::int64_t>(report.negative.size()) - 1))];
      if (report.b[x.ap[i]] >= 0.0 && rates(i, j) > 0.0) {
        moved.ap[i] = static_cast<int>(j);
        return moved;
      }
    }
    return moved;
  }

  // Everything is a bottleneck: move off any non-minimal AP downhill in B.
  const double b_min = report.b.minCoeff();
  for (int attempt = 0; attempt < kMoveAttempts; ++attempt) {
    const Index i = static_cast<Index>(rng.uniform_int(0, n - 1));
    if (!(report.b[x.ap[i]] > b_min)) continue;
    const Index j = static_cast<Index>(rng.uniform_int(0, m - 1));
    if (rates(i, j) > 0.0 && report.b[j] < report.b[x.ap[i]]) {
      moved.ap[i] = static_cast<int>(j);
      return moved;
    }
  }
  return moved;
}

namespace {

bool all_demands_met(const Association& x, const Matrix& t, const Matrix& rates,
                     std::span<const FrameConfig> frames, const Vector& lambda_bps) {
  for (Index i = 0; i < x.num_clients(); ++i) {
    const Index j = x.ap[i];
    const double served = t(i, j) * frames[static_cast<std::size_t>(j)].efficiency() * rates(i, j);
    if (std::abs(served - lambda_bps[i]) > kFeasTol * lambda_bps[i]) return false;
  }
  return true;
}

}  // namespace

SAResult simulated_annealing(const Association& x0, const Matrix& rates,
                             std::span<const FrameConfig> frames, const Vector& lambda_bps,
                             const SAParams& params, std::vector<SATraceRow>* trace) {
  params.validate();
  validate_association(x0, rates);
  const auto start = std::chrono::steady_clock::now();
  const int q = params.resolve_q(x0.num_clients(), x0.num_aps);
  Rng rng(params.seed);

  Association x = x0;
  Matrix t = water_filling(x, rates, frames, lambda_bps);
  double u = finite_utility(x, t, rates, frames);

  Association best_x = x;
  Matrix best_t = t;
  double best_u = u;

  long perturbations = 0;
  bool satisfied = false;
  double temperature = params.t0;
  int v = 1;
  while (temperature > params.tmin && !satisfied) {
    for (int k = 0; k < q; ++k) {
      if (all_demands_met(x, t, rates, frames, lambda_bps)) {
        // Served throughput equals every demand: nothing can do better.
        best_x = x;
        best_t = t;
        best_u = u;
        satisfied = true;
        break;
      }
      Association cand = perturbate(x, t, rates, frames, lambda_bps, params.p, rng);
      Matrix cand_t = water_filling(cand, rates, frames, lambda_bps);
      const double cand_u = finite_utility(cand, cand_t, rates, frames);
      ++perturbations;
      const double delta = cand_u - u;
      const bool accept = delta > 0.0 || rng.uniform() < std::exp(delta / temperature);
      if (accept) {
        x = std::move(cand);
        t = std::move(cand_t);
        u = cand_u;
        if (u > best_u) {
          best_x = x;
          best_t = t;
          best_u = u;
        }
      }
      if (trace) trace->push_back({perturbations, temperature, u, accept});
    }
    temperature *= std::pow(params.alpha, v);
    ++v;
  }

  SAResult result;
  result.x = std::move(best_x);
  result.t = std::move(best_t);
  result.report.per_client_throughput_bps = throughput(result.x, result.t, rates, frames);
  result.report.utility_nats = best_u;
  result.report.aggregate_bps = result.report.per_client_throughput_bps.sum();
  result.report.iterations = perturbations;
  result.report.policy_name = "proposed-sawf";
  result.report.seed = params.seed;
  result.report.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

SAResult best_of_restarts(const Association& x0, const Matrix& rates,
                          std::span<const FrameConfig> frames, const Vector& lambda_bps,
                          const SAParams& params, std::span<const std::uint64_t> seeds,
                          int threads) {
  if (seeds.empty()) throw std::invalid_argument("at least one restart seed required");
  std::vector<SAResult> results(seeds.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    while (true) {
      const std::size_t k = next.fetch_add(1);
      if (k >= seeds.size()) return;
      SAParams restart = params;
      restart.seed = seeds[k];
      results[k] = simulated_annealing(x0, rates, frames, lambda_bps, restart);
    }
  };
  const int workers = std::clamp<int>(threads, 1, static_cast<int>(seeds.size()));
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  std::size_t best = 0;
  for (std::size_t k = 1; k < results.size(); ++k)
    if (results[k].report.utility_nats > results[best].report.utility_nats) best = k;
  return std::move(results[best]);
}

}  // namespace mmw::loadsolve
