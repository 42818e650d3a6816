#include "mmw/satsolve.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "mmw/core.hpp"

namespace mmw::satsolve {

namespace {

// Column sums floored away from zero so empty-AP gradients stay finite.
constexpr double kColumnFloor = 1e-12;

std::vector<std::vector<Index>> feasible_lists(const Matrix& rates) {
  std::vector<std::vector<Index>> feasible(static_cast<std::size_t>(rates.rows()));
  for (Index i = 0; i < rates.rows(); ++i)
    for (Index j = 0; j < rates.cols(); ++j)
      if (rates(i, j) > 0.0) feasible[static_cast<std::size_t>(i)].push_back(j);
  return feasible;
}

}  // namespace

void RelaxedSolverParams::validate() const {
  if (step_size <= 0.0 || max_iters <= 0 || utility_tol <= 0.0 || projection_tol <= 0.0)
    throw std::invalid_argument("relaxed solver parameters must be positive");
}

double relaxed_utility(const Matrix& xf, const Matrix& rates, std::span<const FrameConfig> frames) {
  double u = 0.0;
  for (Index j = 0; j < xf.cols(); ++j) {
    const double col = xf.col(j).sum();
    if (col <= 0.0) continue;
    const double h = frames[static_cast<std::size_t>(j)].efficiency();
    for (Index i = 0; i < xf.rows(); ++i) {
      const double x = xf(i, j);
      if (x > 0.0) u += x * std::log(h * rates(i, j) / col);
    }
  }
  return u;
}

Matrix relaxed_utility_gradient(const Matrix& xf, const Matrix& rates,
                                std::span<const FrameConfig> frames) {
  Matrix g = Matrix::Zero(xf.rows(), xf.cols());
  for (Index j = 0; j < xf.cols(); ++j) {
    const double col = std::max(xf.col(j).sum(), kColumnFloor);
    const double h = frames[static_cast<std::size_t>(j)].efficiency();
    for (Index i = 0; i < xf.rows(); ++i) {
      if (rates(i, j) > 0.0) g(i, j) = std::log(h * rates(i, j) / col) - 1.0;
    }
  }
  return g;
}

Vector project_capped_simplex(const Vector& v, const std::vector<Index>& feasible, Index size) {
  Vector w = Vector::Zero(size);
  if (feasible.empty()) return w;
  double positive_sum = 0.0;
  for (Index j : feasible) {
    if (v[j] > 0.0) positive_sum += v[j];
  }
  if (positive_sum <= 1.0) {
    for (Index j : feasible) w[j] = std::max(v[j], 0.0);
    return w;
  }
  // Sort-based projection onto the unit simplex restricted to the feasible coords.
  std::vector<double> u;
  u.reserve(feasible.size());
  for (Index j : feasible) u.push_back(v[j]);
  std::sort(u.begin(), u.end(), std::greater<>());
  double running = 0.0;
  double tau = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    running += u[k];
    const double candidate = (running - 1.0) / static_cast<double>(k + 1);
    if (u[k] - candidate > 0.0) tau = candidate;
  }
  for (Index j : feasible) w[j] = std::max(v[j] - tau, 0.0);
  return w;
}

RelaxedSolution solve_relaxed(const Matrix& rates, std::span<const FrameConfig> frames,
                              const RelaxedSolverParams& params, Rng& rng) {
  validate_rates(rates);
  params.validate();
  const Index n = rates.rows(), m = rates.cols();
  const auto feasible = feasible_lists(rates);

  // Start from the uniform feasible point with a small jitter so symmetric
  // instances do not all land on the same optimum face.
  Matrix x = Matrix::Zero(n, m);
  for (Index i = 0; i < n; ++i) {
    const auto& fi = feasible[static_cast<std::size_t>(i)];
    double row_sum = 0.0;
    for (Index j : fi) {
      x(i, j) = 1.0 + 0.02 * (rng.uniform() - 0.5);
      row_sum += x(i, j);
    }
    for (Index j : fi) x(i, j) /= row_sum;
  }

  RelaxedSolution sol;
  double u = relaxed_utility(x, rates, frames);
  sol.trace.push_back(u);
  sol.converged = false;

  Matrix candidate(n, m);
  int iter = 0;
  for (; iter < params.max_iters; ++iter) {
    const Matrix g = relaxed_utility_gradient(x, rates, frames);
    double step = params.step_size;
    bool accepted = false;
    double u_new = u;
    for (int bt = 0; bt < 60; ++bt) {
      candidate.setZero();
      for (Index i = 0; i < n; ++i) {
        const Vector moved = x.row(i).transpose() + step * g.row(i).transpose();
        candidate.row(i) =
            project_capped_simplex(moved, feasible[static_cast<std::size_t>(i)], m).transpose();
      }
      u_new = relaxed_utility(candidate, rates, frames);
      if (u_new >= u - params.projection_tol) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      sol.converged = true;  // no ascent direction left at any step size
      break;
    }
    const double gain = u_new - u;
    x.swap(candidate);
    u = u_new;
    sol.trace.push_back(u);
    if (gain < params.utility_tol) {
      sol.converged = true;
      ++iter;
      break;
    }
  }

  // Withheld row mass never helps at these rate magnitudes; pin sums to 1.
  for (Index i = 0; i < n; ++i) {
    const double s = x.row(i).sum();
    if (s > 0.0) x.row(i) /= s;
  }
  sol.x = std::move(x);
  sol.utility = relaxed_utility(sol.x, rates, frames);
  sol.iterations = iter;
  return sol;
}

Association round_ml(const Matrix& xf) {
  Association assoc;
  assoc.num_aps = xf.cols();
  assoc.ap.resize(xf.rows());
  for (Index i = 0; i < xf.rows(); ++i) {
    Index best = 0;
    for (Index j = 1; j < xf.cols(); ++j)
      if (xf(i, j) > xf(i, best)) best = j;
    assoc.ap[i] = static_cast<int>(best);
  }
  return assoc;
}

Association round_iterative(const Matrix& xf, const Matrix& rates, Rng& rng,
                            bool deterministic_ties, int* selection_steps) {
  validate_fractional(xf, rates);
  const Index n = xf.rows(), m = xf.cols();
  Matrix work = xf;
  std::vector<bool> rounded(static_cast<std::size_t>(n), false);

  Association assoc;
  assoc.num_aps = m;
  assoc.ap.resize(n);

  int steps = 0;
  std::vector<std::pair<Index, Index>> ties;
  for (Index round = 0; round < n; ++round, ++steps) {
    // Largest unrounded feasible entry; exact ties collected.
    double best = -1.0;
    ties.clear();
    for (Index i = 0; i < n; ++i) {
      if (rounded[static_cast<std::size_t>(i)]) continue;
      for (Index j = 0; j < m; ++j) {
        if (!(rates(i, j) > 0.0)) continue;
        const double v = work(i, j);
        if (v > best) {
          best = v;
          ties.clear();
          ties.emplace_back(i, j);
        } else if (v == best) {
          ties.emplace_back(i, j);
        }
      }
    }
    const auto [ci, cj] = deterministic_ties
                              ? ties.front()
                              : ties[static_cast<std::size_t>(rng.uniform_int(
                                    0, static_cast<std::int64_t>(ties.size()) - 1))];

    const Vector freed = work.row(ci).transpose();
    rounded[static_cast<std::size_t>(ci)] = true;
    work.row(ci).setZero();
    assoc.ap[ci] = static_cast<int>(cj);

    // Hand the freed mass on every other AP to the unrounded clients that
    // can still reach it; shares with no eligible receiver are dropped.
    for (Index j = 0; j < m; ++j) {
      if (j == cj || freed[j] <= 0.0) continue;
      Index receivers = 0;
      for (Index i = 0; i < n; ++i)
        if (!rounded[static_cast<std::size_t>(i)] && rates(i, j) > 0.0) ++receivers;
      if (receivers == 0) continue;
      const double share = freed[j] / static_cast<double>(receivers);
      for (Index i = 0; i < n; ++i)
        if (!rounded[static_cast<std::size_t>(i)] && rates(i, j) > 0.0) work(i, j) += share;
    }
  }
  if (selection_steps) *selection_steps = steps;
  return assoc;
}

std::pair<Association, SolveReport> solve_saturation(const Matrix& rates,
                                                     std::span<const FrameConfig> frames,
                                                     const RelaxedSolverParams& params, Rng& rng,
                                                     bool deterministic_ties) {
  const auto start = std::chrono::steady_clock::now();
  RelaxedSolution relaxed = solve_relaxed(rates, frames, params, rng);
  Association x = round_iterative(relaxed.x, rates, rng, deterministic_ties);
  const Matrix t = equal_airtime(x, frames);
  SolveReport report;
  report.per_client_throughput_bps = throughput(x, t, rates, frames);
  report.utility_nats = utility(report.per_client_throughput_bps);
  report.aggregate_bps = report.per_client_throughput_bps.sum();
  report.iterations = relaxed.iterations;
  report.policy_name = "proposed-sat";
  report.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {std::move(x), std::move(report)};
}

}  // namespace mmw::satsolve
