#ifndef STM_MODEL_HPP
#define STM_MODEL_HPP

#include <span>
#include <vector>

#include "stm/gmrf.hpp"
#include "stm/lattice.hpp"
#include "stm/types.hpp"

namespace stm {

/// Observed responses on a lattice. Y is n x N_D (subjects by voxels), X is
/// n x p with an all-ones intercept in column 0 by convention.
class Dataset {
 public:
  Dataset(Lattice lattice, MatrixXd Y, MatrixXd X, double c0);

  const Lattice& lattice() const { return lattice_; }
  const MatrixXd& Y() const { return Y_; }
  const MatrixXd& X() const { return X_; }
  double c0() const { return c0_; }

  Index subjects() const { return Y_.rows(); }
  Index voxels() const { return Y_.cols(); }
  Index covariates() const { return X_.cols(); }

  /// False when X^T X is numerically singular. Loading only warns on this.
  bool full_rank() const { return full_rank_; }

  /// FNV-1a over dims, c0, Y and X bytes.
  std::uint64_t fingerprint() const;

 private:
  Lattice lattice_;
  MatrixXd Y_;
  MatrixXd X_;
  double c0_;
  bool full_rank_ = true;
};

struct Hyperparams {
  double delta0 = 1e-3;   // tau ~ Gamma(shape delta0/2, rate gamma0/2)
  double gamma0 = 1e-3;
  double n_nu = 1e-3;     // nu_k ~ Gamma(shape n_nu/2, rate n_nu s_nu_sq/2)
  double s_nu_sq = 1.0;
  double a = 3.0;         // lambda ~ U(-a, b)
  double b = 3.0;
  VectorXd phi;           // one spatial parameter per covariate; fixed
  double delta_lambda = 0.1;  // proposal standard deviation for lambda
  double r0 = 2.0;

  /// Throws ParameterError unless every value is admissible for p covariates.
  void validate(Index p) const;
  bool lambda_in_support(double lambda) const { return lambda > -a && lambda < b; }
};

/// Default settings of the simulation study with phi_k = 10 for every k.
Hyperparams default_hyperparams(Index p);

struct ModelState {
  MatrixXd beta;    // p x N_D
  VectorXd tau;     // N_D, residual precisions
  VectorXd lambda;  // N_D, transformation exponents
  VectorXd nu;      // p, GMRF scales

  bool in_support(const Hyperparams& hp) const;
  bool operator==(const ModelState&) const = default;
};

using GmrfSet = std::vector<GmrfStructure<double>>;

/// One structure per covariate, sharing the lattice neighbourhood but each with
/// its own phi.
GmrfSet build_priors(const Lattice& lattice, const Hyperparams& hp, Index p);

double log_gamma_density(double x, double shape, double rate);
double log_normal_density(double x, double mean, double precision);

/// sum_i [ 0.5 log(tau/2pi) - tau/2 (y_i^(lambda) - x_i' beta)^2 + (lambda - 1) log(y_i + c0) ]
double log_likelihood_voxel(const Dataset& ds, const ModelState& st, Index d);

/// Unnormalised log posterior. The 0.5 log det(I + phi_k H_k) terms are
/// omitted: phi is fixed so they are constant. Returns -inf when any lambda
/// lies outside (-a, b).
double log_joint(const Dataset& ds, const ModelState& st, std::span<const GmrfStructure<double>> gmrf,
                 const Hyperparams& hp);

}  // namespace stm

#endif  // STM_MODEL_HPP
