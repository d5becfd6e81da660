#include "stm/baselines.hpp"

#include <Eigen/Dense>

#include "stm/summary.hpp"

namespace stm {

std::string to_string(BaselineMethod m) { return m == BaselineMethod::Ols ? "ols" : "gmrf-fixed-lambda"; }

BaselineMethod parse_baseline_method(const std::string& name) {
  if (name == "ols") return BaselineMethod::Ols;
  if (name == "gmrf-fixed-lambda") return BaselineMethod::GmrfFixedLambda;
  throw ParameterError("unknown baseline method '" + name + "'");
}

BaselineResult fit_ols(const Dataset& ds) {
  const MatrixXd& X = ds.X();
  Eigen::ColPivHouseholderQR<MatrixXd> qr(X);
  if (qr.rank() < X.cols()) throw DomainError("design matrix is rank deficient; X^T X is singular");
  return {qr.solve(ds.Y()), BaselineMethod::Ols};
}

Chain fixed_lambda_chain(const Dataset& ds, const Hyperparams& hp, SamplerConfig cfg) {
  cfg.sample_lambda = false;
  return run_chain(ds, hp, cfg, initial_state(ds, hp, InitStrategy::LeastSquares));
}

BaselineResult fit_gmrf_fixed_lambda(const Dataset& ds, const Hyperparams& hp, const SamplerConfig& cfg) {
  const Chain chain = fixed_lambda_chain(ds, hp, cfg);
  MatrixXd mean = MatrixXd::Zero(ds.covariates(), ds.voxels());
  for (const auto& st : chain.draws) mean += st.beta;
  mean /= static_cast<double>(chain.draws.size());
  return {std::move(mean), BaselineMethod::GmrfFixedLambda};
}

VectorXd rmse_rows(const MatrixXd& estimate, const MatrixXd& truth) {
  if (estimate.rows() != truth.rows() || estimate.cols() != truth.cols())
    throw DimensionError("estimate and truth differ in shape");
  return ((estimate - truth).array().square().rowwise().mean()).sqrt().matrix();
}

}  // namespace stm
