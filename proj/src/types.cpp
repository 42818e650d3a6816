#include "mmw/types.hpp"

#include <cmath>
#include <string>

namespace mmw {

void validate_rates(const Matrix& rates) {
  if (rates.rows() < 1 || rates.cols() < 1)
    throw std::invalid_argument("rate matrix must be at least 1x1");
  if (!rates.allFinite()) throw std::invalid_argument("rate matrix has non-finite entries");
  if ((rates.array() < 0.0).any()) throw std::invalid_argument("rate matrix has negative entries");
  for (Index i = 0; i < rates.rows(); ++i) {
    if ((rates.row(i).array() > 0.0).count() == 0)
      throw InfeasibleInstanceError("client " + std::to_string(i) + " has no feasible AP", i);
  }
}

void validate_association(const Association& x, const Matrix& rates) {
  if (x.ap.size() != rates.rows() || x.num_aps != rates.cols())
    throw std::invalid_argument("association shape does not match rate matrix");
  for (Index i = 0; i < x.ap.size(); ++i) {
    if (x.ap[i] < 0 || x.ap[i] >= x.num_aps)
      throw std::invalid_argument("association AP index out of range for client " + std::to_string(i));
    if (!(rates(i, x.ap[i]) > 0.0))
      throw InfeasibleInstanceError(
          "client " + std::to_string(i) + " associated to unreachable AP " + std::to_string(x.ap[i]), i);
  }
}

void validate_fractional(const Matrix& xf, const Matrix& rates, double tol) {
  if (xf.rows() != rates.rows() || xf.cols() != rates.cols())
    throw std::invalid_argument("fractional association shape does not match rate matrix");
  if ((xf.array() < -tol).any() || (xf.array() > 1.0 + tol).any())
    throw std::invalid_argument("fractional association entries outside [0, 1]");
  for (Index i = 0; i < xf.rows(); ++i) {
    if (xf.row(i).sum() > 1.0 + tol)
      throw std::invalid_argument("fractional association row " + std::to_string(i) + " sums above 1");
    for (Index j = 0; j < xf.cols(); ++j) {
      if (xf(i, j) > tol && !(rates(i, j) > 0.0))
        throw std::invalid_argument("fractional mass on infeasible link (" + std::to_string(i) + ", " +
                                    std::to_string(j) + ")");
    }
  }
}

}  // namespace mmw
