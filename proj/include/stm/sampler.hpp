#ifndef STM_SAMPLER_HPP
#define STM_SAMPLER_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "stm/model.hpp"
#include "stm/rng.hpp"

namespace stm {

/// Box-Cox transformed responses at the current exponents, with the sufficient
/// statistics the single-site updates reuse. z is n x N_D, cross = X^T z.
class TransformedData {
 public:
  TransformedData(const Dataset& ds, const VectorXd& lambda);

  const Dataset& dataset() const { return *ds_; }
  const MatrixXd& z() const { return z_; }
  const MatrixXd& log_shifted() const { return log_shifted_; }
  const MatrixXd& gram() const { return gram_; }
  const MatrixXd& cross() const { return cross_; }
  /// sum_i log(y_i(d) + c0); the log Jacobian at lambda is (lambda - 1) times this.
  const VectorXd& log_sum() const { return log_sum_; }

  VectorXd transformed_column(Index d, double lambda) const;
  void set_lambda(Index d, double lambda);
  void set_column(Index d, VectorXd z_column);

 private:
  const Dataset* ds_;
  MatrixXd log_shifted_;
  MatrixXd z_;
  MatrixXd gram_;
  MatrixXd cross_;
  VectorXd log_sum_;
};

struct GammaParams {
  double shape;
  double rate;
};

/// nu_k | rest ~ Gamma((N_D + n_nu)/2, (n_nu s_nu^2 + beta_k'(I + phi_k H_k) beta_k)/2).
GammaParams nu_conditional(const ModelState& st, const GmrfStructure<double>& gmrf, Index k,
                           const Hyperparams& hp);

/// beta_k(d) | rest: precision tau_d sum_i x_ik^2 + theta, mean combining the
/// partial-residual regression with the GMRF conditional (m, theta).
GaussianConditional<double> beta_conditional(const TransformedData& td, const ModelState& st,
                                             const GmrfStructure<double>& gmrf, Index k, Index d);

/// tau_d | rest ~ Gamma((n + delta0)/2, (sum of squared residuals + gamma0)/2).
GammaParams tau_conditional(const TransformedData& td, const ModelState& st, const Hyperparams& hp,
                            Index d);

/// Unnormalised log full conditional of lambda_d; -inf outside (-a, b).
double lambda_log_target(const TransformedData& td, const ModelState& st, const Hyperparams& hp,
                         Index d, double lambda);

void update_nu(ModelState& st, std::span<const GmrfStructure<double>> gmrf, const Hyperparams& hp,
               const RandomStreams& streams, std::uint64_t iteration);

/// Covariate-outer, voxel-inner single-site sweep over beta.
void update_beta(const TransformedData& td, ModelState& st, std::span<const GmrfStructure<double>> gmrf,
                 const RandomStreams& streams, std::uint64_t iteration);

void update_tau(const TransformedData& td, ModelState& st, const Hyperparams& hp,
                const RandomStreams& streams, std::uint64_t iteration, unsigned threads = 1);

/// Random-walk Metropolis-Hastings step for every lambda_d. `proposal_sd`
/// holds one standard deviation per voxel. Entries of `accepted` are set to 1
/// when the move at that voxel was accepted.
void update_lambda(TransformedData& td, ModelState& st, const Hyperparams& hp, const VectorXd& proposal_sd,
                   const RandomStreams& streams, std::uint64_t iteration, std::vector<std::uint8_t>& accepted,
                   unsigned threads = 1);

/// Joint move of (lambda_d, beta(d)): a random-walk proposal for lambda_d with
/// beta(d) shifted by the least-squares change of the transformed responses,
/// beta' = beta + (X^T X)^{-1} X^T (z(lambda') - z(lambda)). The shift is a
/// translation whose reverse is the same map from lambda', so the acceptance
/// ratio is the plain target ratio including the GMRF prior at voxel d.
/// Sequential over voxels because beta(d) enters its neighbours' priors.
void update_lambda_beta_shift(TransformedData& td, ModelState& st, std::span<const GmrfStructure<double>> gmrf,
                              const Hyperparams& hp, const VectorXd& proposal_sd, const RandomStreams& streams,
                              std::uint64_t iteration, std::vector<std::uint8_t>& accepted);

enum class InitStrategy {
  LeastSquares,  // lambda = 1, per-voxel OLS
  Profile,       // per-voxel profile-likelihood lambda, then OLS at that lambda
};

struct SamplerConfig {
  Index iterations = 1000;
  Index burn_in = 50;
  std::uint64_t seed = 0;
  Index thin = 1;
  bool sample_lambda = true;
  /// Tune each proposal sd toward 0.44 acceptance during burn-in, then freeze.
  bool adapt_lambda = true;
  /// Follow each lambda step with a joint (lambda, beta) shift move.
  bool joint_moves = false;
  InitStrategy init = InitStrategy::Profile;
  unsigned threads = 1;

  void validate() const;
  Index retained() const { return (iterations - burn_in) / thin; }
};

/// Starting point. tau_d is the inverse residual variance with the variance
/// floored at 1e-6, nu_k = 1.
ModelState initial_state(const Dataset& ds, const Hyperparams& hp, InitStrategy strategy);

/// Maximiser of the per-voxel profile log likelihood over lambda in (-a, b).
double profile_lambda(const Dataset& ds, Index d, const Hyperparams& hp);

struct Chain {
  std::vector<ModelState> draws;
  std::vector<std::uint64_t> lambda_accept;
  VectorXd proposal_sd;
  std::vector<std::uint64_t> shift_accept;
  VectorXd shift_sd;
  SamplerConfig config;
  Hyperparams hyperparams;
  std::uint64_t data_fingerprint = 0;
  double seconds_per_sweep = 0.0;

  Index voxels() const { return draws.empty() ? 0 : draws.front().tau.size(); }
  Index covariates() const { return draws.empty() ? 0 : draws.front().beta.rows(); }
};

/// Sweeps nu, beta, tau, lambda in that order. Deterministic in (seed, config,
/// data, init).
Chain run_chain(const Dataset& ds, const Hyperparams& hp, const SamplerConfig& cfg,
                std::optional<ModelState> init = std::nullopt);

}  // namespace stm

#endif  // STM_SAMPLER_HPP
