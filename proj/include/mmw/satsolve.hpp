#pragma once

#include <span>
#include <utility>
#include <vector>

#include "mmw/rng.hpp"
#include "mmw/types.hpp"

namespace mmw::satsolve {

struct RelaxedSolverParams {
  double step_size = 0.05;
  int max_iters = 5000;
  double utility_tol = 1e-8;     // stop when one ascent step improves less
  double projection_tol = 1e-12;

  void validate() const;
};

/// Objective of the fractional association problem:
///   U(x) = sum_{i,j} x_{i,j} ln( h_j r_{i,j} / sum_k x_{k,j} )
/// with 0 * ln(.) = 0 and empty columns contributing nothing.
double relaxed_utility(const Matrix& xf, const Matrix& rates, std::span<const FrameConfig> frames);

/// Analytic partials dU/dx_{i,j} = ln(h_j r_{i,j} / c_j) - 1 on feasible
/// entries; infeasible entries get 0 (those coordinates are pinned).
Matrix relaxed_utility_gradient(const Matrix& xf, const Matrix& rates,
                                std::span<const FrameConfig> frames);

/// Euclidean projection of one row onto {v >= 0, sum v <= 1} with the given
/// coordinates pinned at zero. Exposed for testing.
Vector project_capped_simplex(const Vector& v, const std::vector<Index>& feasible, Index size);

struct RelaxedSolution {
  Matrix x;
  double utility = 0.0;
  int iterations = 0;
  bool converged = true;
  std::vector<double> trace;  // utility after each accepted step
};

/// Projected gradient ascent with backtracking over the product of per-client
/// capped simplices. Rows are renormalised to sum exactly 1 on return.
RelaxedSolution solve_relaxed(const Matrix& rates, std::span<const FrameConfig> frames,
                              const RelaxedSolverParams& params, Rng& rng);

/// Per-row argmax rounding; ties go to the lowest AP index.
Association round_ml(const Matrix& xf);

/// Rounds the largest unrounded entry first, redistributing the freed
/// fractional mass of the rounded client equally over the unrounded clients
/// that can reach each non-chosen AP. Exactly N selection steps. Exact ties
/// are broken randomly unless deterministic_ties is set (then lowest (i,j)).
Association round_iterative(const Matrix& xf, const Matrix& rates, Rng& rng,
                            bool deterministic_ties = false, int* selection_steps = nullptr);

/// Relax, round, then score under equal airtime.
std::pair<Association, SolveReport> solve_saturation(const Matrix& rates,
                                                     std::span<const FrameConfig> frames,
                                                     const RelaxedSolverParams& params, Rng& rng,
                                                     bool deterministic_ties = false);

}  // namespace mmw::satsolve
