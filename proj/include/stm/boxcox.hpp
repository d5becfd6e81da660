#ifndef STM_BOXCOX_HPP
#define STM_BOXCOX_HPP

#include <cmath>

#include "stm/types.hpp"

namespace stm {

/// Exponents this close to zero use the log branch.
inline constexpr double kLogBranchTolerance = 1e-8;

/// Box-Cox transform given log(y + c0). expm1 keeps the small-lambda branch
/// accurate right up to the log-branch cutoff.
template <typename Scalar>
Scalar boxcox_from_log(Scalar log_shifted, Scalar lambda) {
  using std::abs;
  using std::expm1;
  if (abs(lambda) < Scalar(kLogBranchTolerance)) return log_shifted;
  return expm1(lambda * log_shifted) / lambda;
}

/// ((y + c0)^lambda - 1) / lambda, or log(y + c0) at lambda = 0.
template <typename Scalar>
Scalar boxcox(Scalar y, Scalar lambda, Scalar c0) {
  using std::log;
  const Scalar shifted = y + c0;
  if (!(shifted > Scalar(0))) throw DomainError("box-cox requires y + c0 > 0");
  return boxcox_from_log(log(shifted), lambda);
}

template <typename Scalar>
Scalar inverse_boxcox(Scalar z, Scalar lambda, Scalar c0) {
  using std::abs;
  using std::exp;
  using std::log1p;
  if (abs(lambda) < Scalar(kLogBranchTolerance)) return exp(z) - c0;
  const Scalar base = lambda * z;
  if (!(base + Scalar(1) > Scalar(0))) throw DomainError("inverse box-cox requires lambda * z + 1 > 0");
  return exp(log1p(base) / lambda) - c0;
}

/// Log Jacobian of the transform over a set of observations:
/// sum_i (lambda - 1) log(y_i + c0).
template <typename Derived>
typename Derived::Scalar boxcox_log_jacobian(const Eigen::MatrixBase<Derived>& ys,
                                             typename Derived::Scalar lambda,
                                             typename Derived::Scalar c0) {
  using Scalar = typename Derived::Scalar;
  using std::log;
  Scalar sum(0);
  for (Index i = 0; i < ys.size(); ++i) {
    const Scalar shifted = ys(i) + c0;
    if (!(shifted > Scalar(0))) throw DomainError("box-cox requires y + c0 > 0");
    sum += log(shifted);
  }
  return (lambda - Scalar(1)) * sum;
}

/// Smallest non-negative shift making every entry at least eps after shifting.
template <typename Derived>
typename Derived::Scalar default_shift(const Eigen::MatrixBase<Derived>& y,
                                       typename Derived::Scalar eps = 1e-3) {
  using std::max;
  using Scalar = typename Derived::Scalar;
  if (y.size() == 0) return Scalar(0);
  return max(Scalar(0), eps - y.minCoeff());
}

}  // namespace stm

#endif  // STM_BOXCOX_HPP
