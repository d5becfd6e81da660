#include <Eigen/Dense>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "stm/baselines.hpp"
#include "stm/simgen.hpp"

using namespace stm;

TEST_CASE("method names") {
  CHECK(to_string(BaselineMethod::Ols) == "ols");
  CHECK(to_string(BaselineMethod::GmrfFixedLambda) == "gmrf-fixed-lambda");
  CHECK(parse_baseline_method("ols") == BaselineMethod::Ols);
  CHECK(parse_baseline_method("gmrf-fixed-lambda") == BaselineMethod::GmrfFixedLambda);
  CHECK_THROWS_AS(parse_baseline_method("stm"), ParameterError);
}

TEST_CASE("OLS on noiseless identity-transform data is exact") {
  SimScenario sc;
  sc.dims = {6, 6};
  sc.n = 25;
  sc.sigma = 0.0;
  sc.lambda_levels = {1.0};
  sc.seed = 2;
  const SimulatedData sim = gen_dataset(sc);
  const BaselineResult r = fit_ols(sim.data);
  CHECK(r.method == BaselineMethod::Ols);
  MatrixXd expected = sim.beta_true;
  expected.row(0).array() += 1.0;  // y = x'beta + 1
  CHECK((r.beta_est - expected).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("saturated OLS fit has zero residuals") {
  std::mt19937_64 rng(7);
  const Dataset ds = oracle::small_dataset({2, 3}, 3, 3, rng);
  const BaselineResult r = fit_ols(ds);
  CHECK((ds.Y() - ds.X() * r.beta_est).cwiseAbs().maxCoeff() < 1e-10);
  CHECK(r.beta_est.rows() == 3);
  CHECK(r.beta_est.cols() == 6);
}

TEST_CASE("OLS agrees with the normal equations and rejects singular designs") {
  std::mt19937_64 rng(8);
  const Dataset ds = oracle::small_dataset({3, 3}, 40, 3, rng);
  const MatrixXd& X = ds.X();
  const MatrixXd ref = (X.transpose() * X).inverse() * X.transpose() * ds.Y();
  CHECK((fit_ols(ds).beta_est - ref).cwiseAbs().maxCoeff() < 1e-10);

  MatrixXd Xs = X;
  Xs.col(2) = 2.0 * Xs.col(1);
  CHECK_THROWS_AS(fit_ols(Dataset(ds.lattice(), ds.Y(), Xs, 0.0)), DomainError);
}

TEST_CASE("fixed-lambda baseline never touches lambda") {
  std::mt19937_64 rng(9);
  const Dataset ds = oracle::small_dataset({3, 3}, 15, 2, rng);
  SamplerConfig cfg;
  cfg.iterations = 80;
  cfg.burn_in = 10;
  cfg.seed = 3;
  const Chain ch = fixed_lambda_chain(ds, default_hyperparams(2), cfg);
  for (auto a : ch.lambda_accept) CHECK(a == 0);
  for (const auto& s : ch.draws) CHECK(s.lambda == VectorXd::Ones(9));
  CHECK(ch.draws.size() == 70);

  const BaselineResult r = fit_gmrf_fixed_lambda(ds, default_hyperparams(2), cfg);
  CHECK(r.method == BaselineMethod::GmrfFixedLambda);
  MatrixXd mean = MatrixXd::Zero(2, 9);
  for (const auto& s : ch.draws) mean += s.beta;
  mean /= 70.0;
  CHECK((r.beta_est - mean).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("fixed-lambda baseline is a strict restriction of the sampler") {
  std::mt19937_64 rng(10);
  const Dataset ds = oracle::small_dataset({4, 3}, 20, 2, rng);
  const Hyperparams hp = default_hyperparams(2);
  SamplerConfig cfg;
  cfg.iterations = 60;
  cfg.burn_in = 10;
  cfg.seed = 12;

  // lambda step off: the baseline is run_chain from the lambda = 1 start
  SamplerConfig off = cfg;
  off.sample_lambda = false;
  const Chain base = fixed_lambda_chain(ds, hp, cfg);
  const Chain direct = run_chain(ds, hp, off, initial_state(ds, hp, InitStrategy::LeastSquares));
  bool same = base.draws.size() == direct.draws.size();
  for (std::size_t i = 0; same && i < base.draws.size(); ++i) same = base.draws[i] == direct.draws[i];
  CHECK(same);

  // lambda step back on from lambda = 1: identical to the least-squares-initialised chain
  SamplerConfig on = cfg;
  on.init = InitStrategy::LeastSquares;
  const Chain a = run_chain(ds, hp, on);
  const Chain b = run_chain(ds, hp, cfg, initial_state(ds, hp, InitStrategy::LeastSquares));
  same = a.draws.size() == b.draws.size();
  for (std::size_t i = 0; same && i < a.draws.size(); ++i) same = a.draws[i] == b.draws[i];
  CHECK(same);
  CHECK(a.lambda_accept == b.lambda_accept);
}

TEST_CASE("rmse rows") {
  MatrixXd est(2, 3), truth = MatrixXd::Zero(2, 3);
  est << 1, 1, 1, 3, 0, 4;
  const VectorXd r = rmse_rows(est, truth);
  CHECK(r(0) == doctest::Approx(1.0));
  CHECK(r(1) == doctest::Approx(std::sqrt(25.0 / 3.0)));
  CHECK_THROWS_AS(rmse_rows(est, MatrixXd::Zero(3, 2)), DimensionError);
}
