#include "stm/model.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <cstring>
#include <limits>
#include <numbers>

#include "stm/boxcox.hpp"

namespace stm {

Dataset::Dataset(Lattice lattice, MatrixXd Y, MatrixXd X, double c0)
    : lattice_(std::move(lattice)), Y_(std::move(Y)), X_(std::move(X)), c0_(c0) {
  if (Y_.cols() != lattice_.size())
    throw DimensionError("response has " + std::to_string(Y_.cols()) + " voxels, lattice has " +
                         std::to_string(lattice_.size()));
  if (X_.rows() != Y_.rows())
    throw DimensionError("design has " + std::to_string(X_.rows()) + " rows, response has " +
                         std::to_string(Y_.rows()));
  if (X_.cols() < 1) throw DimensionError("design needs at least one column");
  if (!std::isfinite(c0_)) throw ParameterError("c0 must be finite");
  if (!Y_.allFinite() || !X_.allFinite()) throw DomainError("data contain non-finite values");
  if (Y_.size() > 0 && !(Y_.minCoeff() + c0_ > 0.0)) throw DomainError("every y + c0 must be positive");

  if (X_.rows() > 0) {
    Eigen::ColPivHouseholderQR<MatrixXd> qr(X_);
    full_rank_ = qr.rank() == X_.cols();
  } else {
    full_rank_ = false;
  }
}

std::uint64_t Dataset::fingerprint() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](const void* p, std::size_t n) {
    const auto* bytes = static_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= bytes[i];
      h *= 0x100000001b3ULL;
    }
  };
  for (Index d : lattice_.dims()) mix(&d, sizeof d);
  mix(&c0_, sizeof c0_);
  mix(Y_.data(), sizeof(double) * Y_.size());
  mix(X_.data(), sizeof(double) * X_.size());
  return h;
}

void Hyperparams::validate(Index p) const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ParameterError(std::string(name) + " must be positive");
  };
  positive(delta0, "delta0");
  positive(gamma0, "gamma0");
  positive(n_nu, "n_nu");
  positive(s_nu_sq, "s_nu_sq");
  positive(a, "a");
  positive(b, "b");
  positive(delta_lambda, "delta_lambda");
  positive(r0, "r0");
  if (phi.size() != p)
    throw ParameterError("phi has " + std::to_string(phi.size()) + " entries for " + std::to_string(p) +
                         " covariates");
  for (Index k = 0; k < p; ++k) positive(phi(k), "phi");
}

Hyperparams default_hyperparams(Index p) {
  Hyperparams hp;
  hp.phi = VectorXd::Constant(p, 10.0);
  return hp;
}

bool ModelState::in_support(const Hyperparams& hp) const {
  return (tau.array() > 0.0).all() && (nu.array() > 0.0).all() && (lambda.array() > -hp.a).all() &&
         (lambda.array() < hp.b).all() && beta.allFinite();
}

GmrfSet build_priors(const Lattice& lattice, const Hyperparams& hp, Index p) {
  hp.validate(p);
  const NeighborhoodGraph graph = build_neighborhood(lattice, hp.r0);
  GmrfSet out;
  out.reserve(p);
  for (Index k = 0; k < p; ++k) out.push_back(build_gmrf_structure(graph, hp.phi(k)));
  return out;
}

double log_gamma_density(double x, double shape, double rate) {
  if (!(x > 0.0)) return -std::numeric_limits<double>::infinity();
  return shape * std::log(rate) - std::lgamma(shape) + (shape - 1.0) * std::log(x) - rate * x;
}

double log_normal_density(double x, double mean, double precision) {
  const double r = x - mean;
  return 0.5 * std::log(precision / (2.0 * std::numbers::pi)) - 0.5 * precision * r * r;
}

double log_likelihood_voxel(const Dataset& ds, const ModelState& st, Index d) {
  const double tau = st.tau(d);
  const double lambda = st.lambda(d);
  const VectorXd fitted = ds.X() * st.beta.col(d);
  double sq = 0.0;
  for (Index i = 0; i < ds.subjects(); ++i) {
    const double r = boxcox(ds.Y()(i, d), lambda, ds.c0()) - fitted(i);
    sq += r * r;
  }
  const double n = static_cast<double>(ds.subjects());
  return 0.5 * n * std::log(tau / (2.0 * std::numbers::pi)) - 0.5 * tau * sq +
         boxcox_log_jacobian(ds.Y().col(d), lambda, ds.c0());
}

double log_joint(const Dataset& ds, const ModelState& st, std::span<const GmrfStructure<double>> gmrf,
                 const Hyperparams& hp) {
  const Index nd = ds.voxels();
  const Index p = ds.covariates();
  if (static_cast<Index>(gmrf.size()) != p) throw DimensionError("one GMRF structure per covariate required");

  for (Index d = 0; d < nd; ++d)
    if (!hp.lambda_in_support(st.lambda(d))) return -std::numeric_limits<double>::infinity();

  double total = 0.0;
  for (Index d = 0; d < nd; ++d) total += log_likelihood_voxel(ds, st, d);

  for (Index k = 0; k < p; ++k) {
    const double nu = st.nu(k);
    const VectorXd beta_k = st.beta.row(k).transpose();
    total += 0.5 * static_cast<double>(nd) * std::log(nu) - 0.5 * nu * gmrf[k].quadratic_form(beta_k);
    total += log_gamma_density(nu, 0.5 * hp.n_nu, 0.5 * hp.n_nu * hp.s_nu_sq);
  }

  for (Index d = 0; d < nd; ++d) total += log_gamma_density(st.tau(d), 0.5 * hp.delta0, 0.5 * hp.gamma0);
  total -= static_cast<double>(nd) * std::log(hp.a + hp.b);
  return total;
}

}  // namespace stm
