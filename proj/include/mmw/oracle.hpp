#pragma once

#include <span>

#include "mmw/types.hpp"

namespace mmw::oracle {

inline constexpr double kDefaultMaxCandidates = 1e7;

class SearchSpaceTooLarge : public std::runtime_error {
 public:
  SearchSpaceTooLarge(std::string msg, double candidates)
      : std::runtime_error(std::move(msg)), candidates_(candidates) {}
  double candidates() const { return candidates_; }

 private:
  double candidates_;
};

/// Product over clients of their feasible AP counts.
double search_space_size(const Matrix& rates);

struct SaturationOptimum {
  Association x;
  double utility = 0.0;
  double candidates = 0.0;
};

/// Enumerates every feasible association and scores it under equal airtime.
/// Ties resolve to the lexicographically smallest association.
SaturationOptimum exhaustive_saturation(const Matrix& rates, std::span<const FrameConfig> frames,
                                        double max_candidates = kDefaultMaxCandidates);

struct FiniteOptimum {
  Association x;
  Matrix t;
  double utility = 0.0;
  double candidates = 0.0;
};

/// Enumerates associations, water-fills each, and keeps the utility maximiser.
FiniteOptimum exhaustive_finite(const Matrix& rates, std::span<const FrameConfig> frames,
                                const Vector& lambda_bps,
                                double max_candidates = kDefaultMaxCandidates);

/// Max relative error between the analytic gradient of the relaxed utility
/// and central finite differences (h = 1e-6) over feasible coordinates.
double gradient_check(const Matrix& xf, const Matrix& rates, std::span<const FrameConfig> frames);

}  // namespace mmw::oracle
