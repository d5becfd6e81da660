#ifndef STM_BASELINES_HPP
#define STM_BASELINES_HPP

#include <string>

#include "stm/sampler.hpp"

namespace stm {

enum class BaselineMethod { Ols, GmrfFixedLambda };

std::string to_string(BaselineMethod m);
BaselineMethod parse_baseline_method(const std::string& name);

struct BaselineResult {
  MatrixXd beta_est;  // p x N_D
  BaselineMethod method;
};

/// Per-voxel least squares on the raw responses.
BaselineResult fit_ols(const Dataset& ds);

/// The sampler with lambda pinned at 1 and its update skipped. Starts from the
/// least-squares initial state.
Chain fixed_lambda_chain(const Dataset& ds, const Hyperparams& hp, SamplerConfig cfg);

BaselineResult fit_gmrf_fixed_lambda(const Dataset& ds, const Hyperparams& hp, const SamplerConfig& cfg);

/// Per-coefficient RMSE across voxels; result has one entry per row.
VectorXd rmse_rows(const MatrixXd& estimate, const MatrixXd& truth);

}  // namespace stm

#endif  // STM_BASELINES_HPP
