#include "mmw/core.hpp"

#include <cmath>
#include <string>

namespace mmw {

Matrix equal_airtime(const Association& x, std::span<const FrameConfig> frames) {
  if (static_cast<Index>(frames.size()) != x.num_aps)
    throw std::invalid_argument("one FrameConfig per AP required");
  const IndexVector n = x.loads();
  Matrix t = Matrix::Zero(x.num_clients(), x.num_aps);
  for (Index i = 0; i < x.num_clients(); ++i) {
    const Index j = x.ap[i];
    t(i, j) = 1.0 / static_cast<double>(n[j]);
  }
  return t;
}

Vector throughput(const Association& x, const Matrix& t, const Matrix& rates,
                  std::span<const FrameConfig> frames) {
  if (t.rows() != x.num_clients() || t.cols() != x.num_aps)
    throw std::invalid_argument("airtime shape does not match association");
  Vector s(x.num_clients());
  for (Index i = 0; i < x.num_clients(); ++i) {
    const Index j = x.ap[i];
    s[i] = t(i, j) * frames[static_cast<std::size_t>(j)].efficiency() * rates(i, j);
  }
  return s;
}

double utility(const Vector& throughput_bps) {
  double u = 0.0;
  for (Index i = 0; i < throughput_bps.size(); ++i) {
    if (!(throughput_bps[i] > 0.0))
      throw DegenerateAllocationError("degenerate allocation: client " + std::to_string(i) +
                                      " has non-positive throughput");
    u += std::log(throughput_bps[i]);
  }
  return u;
}

double diagnostic_utility(const Vector& throughput_bps) {
  double u = 0.0;
  for (Index i = 0; i < throughput_bps.size(); ++i)
    u += std::log(std::max(throughput_bps[i], 1.0));
  return u;
}

FeasibilityReport check_finite_load_feasibility(const Association& x, const Matrix& t,
                                                const Matrix& rates,
                                                std::span<const FrameConfig> frames,
                                                const Vector& lambda_bps) {
  if (lambda_bps.size() != x.num_clients())
    throw std::invalid_argument("one demand per client required");
  FeasibilityReport report;
  for (Index j = 0; j < x.num_aps; ++j) {
    if (t.col(j).sum() > 1.0 + kFeasTol) report.airtime_violations.push_back(j);
  }
  for (Index i = 0; i < x.num_clients(); ++i) {
    const Index j = x.ap[i];
    const double served = t(i, j) * frames[static_cast<std::size_t>(j)].efficiency() * rates(i, j);
    if (served > lambda_bps[i] * (1.0 + kFeasTol)) report.load_violations.push_back(i);
  }
  return report;
}

}  // namespace mmw
