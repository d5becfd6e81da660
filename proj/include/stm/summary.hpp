#ifndef STM_SUMMARY_HPP
#define STM_SUMMARY_HPP

#include <ostream>
#include <vector>

#include "stm/sampler.hpp"

namespace stm {

using BoolMatrix = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;
using BoolVector = Eigen::Array<bool, Eigen::Dynamic, 1>;

/// Empirical quantile with linear interpolation between order statistics:
/// position h = (m - 1) q in the sorted sample. `sorted` must be ascending.
double quantile_sorted(const std::vector<double>& sorted, double q);

struct SummaryMaps {
  double level = 0.95;
  MatrixXd beta_mean, beta_ci_lo, beta_ci_hi;  // p x N_D
  BoolMatrix beta_signif;                     // interval excludes 0
  VectorXd lambda_mean, lambda_ci_lo, lambda_ci_hi;
  BoolVector lambda_not_one;                  // interval excludes 1
  VectorXd tau_mean;
  VectorXd accept_rate;
};

/// Posterior means and equal-tailed intervals at the given level.
SummaryMaps summarize(const Chain& chain, double level);

/// Long-format CSV: one row per (draw, voxel) with p beta columns, tau, lambda.
void trace_report(const Chain& chain, const std::vector<Index>& voxels, std::ostream& out);

/// Sum of |x(d) - x(d')| over axis-aligned nearest-neighbour pairs.
double total_variation(const Lattice& lattice, const VectorXd& image);

}  // namespace stm

#endif  // STM_SUMMARY_HPP
