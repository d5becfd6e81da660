#include "stm/sampler.hpp"

#include <Eigen/Dense>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <thread>

#include "stm/boxcox.hpp"

namespace stm {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kTargetAcceptance = 0.44;

// Runs body(begin, end) over [0, n) split into `threads` contiguous chunks.
void parallel_for(Index n, unsigned threads, const std::function<void(Index, Index)>& body) {
  if (threads <= 1 || n < 2) {
    body(0, n);
    return;
  }
  const Index chunks = std::min<Index>(threads, n);
  std::vector<std::jthread> workers;
  std::vector<std::exception_ptr> errors(chunks);
  for (Index c = 0; c < chunks; ++c) {
    const Index begin = n * c / chunks;
    const Index end = n * (c + 1) / chunks;
    workers.emplace_back([&, c, begin, end] {
      try {
        body(begin, end);
      } catch (...) {
        errors[c] = std::current_exception();
      }
    });
  }
  workers.clear();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

double draw_gamma(Xoshiro256& rng, const GammaParams& g) {
  return std::gamma_distribution<double>(g.shape, 1.0 / g.rate)(rng);
}

// Least-squares fit of every column of z on X. Falls back to the minimum-norm
// solution when X is rank deficient.
MatrixXd least_squares(const MatrixXd& X, const MatrixXd& z) {
  return Eigen::CompleteOrthogonalDecomposition<MatrixXd>(X).solve(z);
}

// Orthonormal basis of span(X), n x rank.
MatrixXd column_basis(const MatrixXd& X) {
  Eigen::ColPivHouseholderQR<MatrixXd> qr(X);
  const Index rank = qr.rank();
  MatrixXd Q = qr.householderQ() * MatrixXd::Identity(X.rows(), rank);
  return Q;
}

double profile_loglik(const MatrixXd& basis, const VectorXd& log_shifted, double log_sum, double lambda) {
  const Index n = log_shifted.size();
  VectorXd z(n);
  for (Index i = 0; i < n; ++i) z(i) = boxcox_from_log(log_shifted(i), lambda);
  const double rss = std::max(z.squaredNorm() - (basis.transpose() * z).squaredNorm(), 1e-300);
  return -0.5 * static_cast<double>(n) * std::log(rss / static_cast<double>(n)) + (lambda - 1.0) * log_sum;
}

double maximize_profile(const MatrixXd& basis, const VectorXd& log_shifted, const Hyperparams& hp) {
  const double lo = -hp.a;
  const double hi = hp.b;
  constexpr int kGrid = 120;
  const double step = (hi - lo) / kGrid;
  const double log_sum = log_shifted.sum();
  auto f = [&](double l) { return profile_loglik(basis, log_shifted, log_sum, l); };

  int best = 1;
  double best_value = kNegInf;
  for (int g = 1; g < kGrid; ++g) {
    const double v = f(lo + g * step);
    if (v > best_value) {
      best_value = v;
      best = g;
    }
  }

  // Golden-section refinement inside the bracketing grid cells.
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double left = lo + (best - 1) * step;
  double right = lo + (best + 1) * step;
  double x1 = right - phi * (right - left);
  double x2 = left + phi * (right - left);
  double f1 = f(x1);
  double f2 = f(x2);
  for (int it = 0; it < 40; ++it) {
    if (f1 < f2) {
      left = x1;
      x1 = x2;
      f1 = f2;
      x2 = left + phi * (right - left);
      f2 = f(x2);
    } else {
      right = x2;
      x2 = x1;
      f2 = f1;
      x1 = right - phi * (right - left);
      f1 = f(x1);
    }
  }
  const double est = 0.5 * (left + right);
  const double margin = 1e-6 * (hi - lo);
  return std::clamp(est, lo + margin, hi - margin);
}

}  // namespace

// ---------------------------------------------------------------------------

TransformedData::TransformedData(const Dataset& ds, const VectorXd& lambda) : ds_(&ds) {
  if (lambda.size() != ds.voxels()) throw DimensionError("lambda length must equal voxel count");
  log_shifted_ = (ds.Y().array() + ds.c0()).log().matrix();
  z_.resize(ds.subjects(), ds.voxels());
  for (Index d = 0; d < ds.voxels(); ++d)
    for (Index i = 0; i < ds.subjects(); ++i) z_(i, d) = boxcox_from_log(log_shifted_(i, d), lambda(d));
  gram_ = ds.X().transpose() * ds.X();
  cross_ = ds.X().transpose() * z_;
  log_sum_ = log_shifted_.colwise().sum().transpose();
}

VectorXd TransformedData::transformed_column(Index d, double lambda) const {
  VectorXd out(log_shifted_.rows());
  for (Index i = 0; i < out.size(); ++i) out(i) = boxcox_from_log(log_shifted_(i, d), lambda);
  return out;
}

void TransformedData::set_lambda(Index d, double lambda) { set_column(d, transformed_column(d, lambda)); }

void TransformedData::set_column(Index d, VectorXd z_column) {
  cross_.col(d).noalias() = ds_->X().transpose() * z_column;
  z_.col(d) = std::move(z_column);
}

// ---------------------------------------------------------------------------

GammaParams nu_conditional(const ModelState& st, const GmrfStructure<double>& gmrf, Index k,
                           const Hyperparams& hp) {
  const VectorXd beta_k = st.beta.row(k).transpose();
  const double quad = gmrf.quadratic_form(beta_k);
  if (quad < 0.0) throw Error("negative GMRF quadratic form; structure matrix is not positive semidefinite");
  const double nd = static_cast<double>(beta_k.size());
  return {0.5 * (nd + hp.n_nu), 0.5 * (hp.n_nu * hp.s_nu_sq + quad)};
}

GaussianConditional<double> beta_conditional(const TransformedData& td, const ModelState& st,
                                             const GmrfStructure<double>& gmrf, Index k, Index d) {
  const auto prior = conditional_params(gmrf, st.nu(k), st.beta.row(k), d);
  const MatrixXd& gram = td.gram();
  double partial = td.cross()(k, d);
  for (Index l = 0; l < gram.rows(); ++l)
    if (l != k) partial -= gram(k, l) * st.beta(l, d);
  const double tau = st.tau(d);
  const double precision = tau * gram(k, k) + prior.precision;
  return {(tau * partial + prior.precision * prior.mean) / precision, precision};
}

GammaParams tau_conditional(const TransformedData& td, const ModelState& st, const Hyperparams& hp, Index d) {
  const double rss = (td.z().col(d) - td.dataset().X() * st.beta.col(d)).squaredNorm();
  const double n = static_cast<double>(td.z().rows());
  return {0.5 * (n + hp.delta0), 0.5 * (rss + hp.gamma0)};
}

double lambda_log_target(const TransformedData& td, const ModelState& st, const Hyperparams& hp, Index d,
                         double lambda) {
  if (!hp.lambda_in_support(lambda)) return kNegInf;
  const double rss = (td.transformed_column(d, lambda) - td.dataset().X() * st.beta.col(d)).squaredNorm();
  return -0.5 * st.tau(d) * rss + (lambda - 1.0) * td.log_sum()(d);
}

// ---------------------------------------------------------------------------

void update_nu(ModelState& st, std::span<const GmrfStructure<double>> gmrf, const Hyperparams& hp,
               const RandomStreams& streams, std::uint64_t iteration) {
  for (Index k = 0; k < st.nu.size(); ++k) {
    auto rng = streams.engine(Stream::Nu, iteration, static_cast<std::uint64_t>(k));
    st.nu(k) = draw_gamma(rng, nu_conditional(st, gmrf[k], k, hp));
  }
}

void update_beta(const TransformedData& td, ModelState& st, std::span<const GmrfStructure<double>> gmrf,
                 const RandomStreams& streams, std::uint64_t iteration) {
  const Index p = st.beta.rows();
  const Index nd = st.beta.cols();
  std::normal_distribution<double> normal;
  for (Index k = 0; k < p; ++k) {
    for (Index d = 0; d < nd; ++d) {
      auto rng = streams.engine(Stream::Beta, iteration, static_cast<std::uint64_t>(k * nd + d));
      const auto c = beta_conditional(td, st, gmrf[k], k, d);
      normal.reset();
      st.beta(k, d) = c.mean + normal(rng) / std::sqrt(c.precision);
    }
  }
}

void update_tau(const TransformedData& td, ModelState& st, const Hyperparams& hp, const RandomStreams& streams,
                std::uint64_t iteration, unsigned threads) {
  parallel_for(st.tau.size(), threads, [&](Index begin, Index end) {
    for (Index d = begin; d < end; ++d) {
      auto rng = streams.engine(Stream::Tau, iteration, static_cast<std::uint64_t>(d));
      st.tau(d) = draw_gamma(rng, tau_conditional(td, st, hp, d));
    }
  });
}

void update_lambda(TransformedData& td, ModelState& st, const Hyperparams& hp, const VectorXd& proposal_sd,
                   const RandomStreams& streams, std::uint64_t iteration, std::vector<std::uint8_t>& accepted,
                   unsigned threads) {
  const Index nd = st.lambda.size();
  accepted.assign(nd, 0);
  const MatrixXd& X = td.dataset().X();
  parallel_for(nd, threads, [&](Index begin, Index end) {
    std::normal_distribution<double> normal;
    std::uniform_real_distribution<double> uniform;
    for (Index d = begin; d < end; ++d) {
      auto rng = streams.engine(Stream::Lambda, iteration, static_cast<std::uint64_t>(d));
      normal.reset();
      const double current = st.lambda(d);
      const double proposal = current + proposal_sd(d) * normal(rng);
      const double log_u = std::log(uniform(rng));
      if (!hp.lambda_in_support(proposal)) continue;

      const VectorXd fitted = X * st.beta.col(d);
      VectorXd z_prop = td.transformed_column(d, proposal);
      const double tau = st.tau(d);
      const double log_sum = td.log_sum()(d);
      const double current_target = -0.5 * tau * (td.z().col(d) - fitted).squaredNorm() + (current - 1.0) * log_sum;
      const double proposal_target = -0.5 * tau * (z_prop - fitted).squaredNorm() + (proposal - 1.0) * log_sum;
      const double delta = proposal_target - current_target;
      if (std::isnan(delta)) continue;
      if (log_u < delta) {
        st.lambda(d) = proposal;
        td.set_column(d, std::move(z_prop));
        accepted[d] = 1;
      }
    }
  });
}

void update_lambda_beta_shift(TransformedData& td, ModelState& st, std::span<const GmrfStructure<double>> gmrf,
                              const Hyperparams& hp, const VectorXd& proposal_sd, const RandomStreams& streams,
                              std::uint64_t iteration, std::vector<std::uint8_t>& accepted) {
  const Index nd = st.lambda.size();
  const Index p = st.beta.rows();
  accepted.assign(nd, 0);
  const MatrixXd& X = td.dataset().X();
  const Eigen::LDLT<MatrixXd> gram(td.gram());
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> uniform;
  VectorXd prior_mean(p), prior_precision(p);
  for (Index d = 0; d < nd; ++d) {
    auto rng = streams.engine(Stream::Shift, iteration, static_cast<std::uint64_t>(d));
    normal.reset();
    const double current = st.lambda(d);
    const double proposal = current + proposal_sd(d) * normal(rng);
    const double log_u = std::log(uniform(rng));
    if (!hp.lambda_in_support(proposal)) continue;

    VectorXd z_prop = td.transformed_column(d, proposal);
    const VectorXd cross_prop = X.transpose() * z_prop;
    const VectorXd beta = st.beta.col(d);
    const VectorXd beta_prop = beta + gram.solve(cross_prop - td.cross().col(d));

    const double tau = st.tau(d);
    double delta = -0.5 * tau * ((z_prop - X * beta_prop).squaredNorm() - (td.z().col(d) - X * beta).squaredNorm()) +
                   (proposal - current) * td.log_sum()(d);
    for (Index k = 0; k < p; ++k) {
      const auto prior = conditional_params(gmrf[k], st.nu(k), st.beta.row(k), d);
      delta += log_normal_density(beta_prop(k), prior.mean, prior.precision) -
               log_normal_density(beta(k), prior.mean, prior.precision);
    }
    if (std::isnan(delta)) continue;
    if (log_u < delta) {
      st.lambda(d) = proposal;
      st.beta.col(d) = beta_prop;
      td.set_column(d, std::move(z_prop));
      accepted[d] = 1;
    }
  }
}

// ---------------------------------------------------------------------------

void SamplerConfig::validate() const {
  if (iterations < 1) throw ParameterError("iterations must be positive");
  if (burn_in < 0 || burn_in >= iterations) throw ParameterError("burn_in must lie in [0, iterations)");
  if (thin < 1) throw ParameterError("thin must be positive");
}

double profile_lambda(const Dataset& ds, Index d, const Hyperparams& hp) {
  const MatrixXd basis = column_basis(ds.X());
  const VectorXd log_shifted = (ds.Y().col(d).array() + ds.c0()).log().matrix();
  return maximize_profile(basis, log_shifted, hp);
}

ModelState initial_state(const Dataset& ds, const Hyperparams& hp, InitStrategy strategy) {
  const Index nd = ds.voxels();
  const Index p = ds.covariates();
  const Index n = ds.subjects();

  ModelState st;
  st.lambda = VectorXd::Ones(nd);
  if (strategy == InitStrategy::Profile) {
    const MatrixXd basis = column_basis(ds.X());
    for (Index d = 0; d < nd; ++d) {
      const VectorXd log_shifted = (ds.Y().col(d).array() + ds.c0()).log().matrix();
      st.lambda(d) = maximize_profile(basis, log_shifted, hp);
    }
  }
  st.lambda = st.lambda.cwiseMax(-hp.a + 1e-9).cwiseMin(hp.b - 1e-9);

  TransformedData td(ds, st.lambda);
  st.beta = least_squares(ds.X(), td.z());
  const MatrixXd residual = td.z() - ds.X() * st.beta;
  const double dof = static_cast<double>(std::max<Index>(n - p, 1));
  st.tau.resize(nd);
  for (Index d = 0; d < nd; ++d) st.tau(d) = 1.0 / std::max(residual.col(d).squaredNorm() / dof, 1e-6);
  st.nu = VectorXd::Ones(p);
  return st;
}

Chain run_chain(const Dataset& ds, const Hyperparams& hp, const SamplerConfig& cfg, std::optional<ModelState> init) {
  cfg.validate();
  const Index p = ds.covariates();
  const Index nd = ds.voxels();
  const GmrfSet gmrf = build_priors(ds.lattice(), hp, p);

  ModelState st = init ? std::move(*init) : initial_state(ds, hp, cfg.init);
  if (st.beta.rows() != p || st.beta.cols() != nd || st.tau.size() != nd || st.lambda.size() != nd ||
      st.nu.size() != p)
    throw DimensionError("initial state does not match the dataset");
  if (!st.in_support(hp)) throw ParameterError("initial state lies outside the prior support");

  TransformedData td(ds, st.lambda);
  const RandomStreams streams(cfg.seed);

  Chain chain;
  chain.config = cfg;
  chain.hyperparams = hp;
  chain.data_fingerprint = ds.fingerprint();
  chain.lambda_accept.assign(nd, 0);
  chain.proposal_sd = VectorXd::Constant(nd, hp.delta_lambda);
  chain.shift_accept.assign(nd, 0);
  chain.shift_sd = VectorXd::Constant(nd, hp.delta_lambda);
  chain.draws.reserve(cfg.retained());

  std::vector<std::uint8_t> accepted;
  const double max_sd = hp.a + hp.b;
  const auto start = std::chrono::steady_clock::now();
  for (Index it = 0; it < cfg.iterations; ++it) {
    const auto t = static_cast<std::uint64_t>(it);
    try {
      update_nu(st, gmrf, hp, streams, t);
      update_beta(td, st, gmrf, streams, t);
      update_tau(td, st, hp, streams, t, cfg.threads);
      if (cfg.sample_lambda) {
        update_lambda(td, st, hp, chain.proposal_sd, streams, t, accepted, cfg.threads);
        const bool adapting = cfg.adapt_lambda && it < cfg.burn_in;
        const double gain = 1.0 / std::sqrt(static_cast<double>(it) + 1.0);
        for (Index d = 0; d < nd; ++d) {
          chain.lambda_accept[d] += accepted[d];
          if (adapting) {
            const double scaled = chain.proposal_sd(d) * std::exp(gain * (accepted[d] - kTargetAcceptance));
            chain.proposal_sd(d) = std::clamp(scaled, 1e-8, max_sd);
          }
        }
        if (cfg.joint_moves) {
          update_lambda_beta_shift(td, st, gmrf, hp, chain.shift_sd, streams, t, accepted);
          for (Index d = 0; d < nd; ++d) {
            chain.shift_accept[d] += accepted[d];
            if (adapting) {
              const double scaled = chain.shift_sd(d) * std::exp(gain * (accepted[d] - kTargetAcceptance));
              chain.shift_sd(d) = std::clamp(scaled, 1e-8, max_sd);
            }
          }
        }
      }
    } catch (const DomainError& e) {
      throw DomainError("iteration " + std::to_string(it) + ": " + e.what());
    }
    if (!st.beta.allFinite() || !st.tau.allFinite() || !st.nu.allFinite())
      throw DomainError("iteration " + std::to_string(it) + ": sampler produced a non-finite value");

    if (it >= cfg.burn_in && (it - cfg.burn_in + 1) % cfg.thin == 0) chain.draws.push_back(st);
  }
  const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
  chain.seconds_per_sweep = elapsed.count() / static_cast<double>(cfg.iterations);
  return chain;
}

}  // namespace stm
