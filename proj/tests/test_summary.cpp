#include <random>
#include <sstream>
#include <string>

#include "doctest.h"
#include "oracles.hpp"
#include "stm/summary.hpp"

using namespace stm;

namespace {

// Chain whose beta(0, 0) and lambda(0) take the given values in order.
Chain chain_of(const std::vector<double>& values, Index p = 1, Index nd = 1) {
  Chain ch;
  ch.config.iterations = static_cast<Index>(values.size());
  ch.config.burn_in = 0;
  ch.lambda_accept.assign(nd, 0);
  for (double v : values) {
    ModelState st;
    st.beta = MatrixXd::Constant(p, nd, v);
    st.tau = VectorXd::Constant(nd, 2.0 * v);
    st.lambda = VectorXd::Constant(nd, v);
    st.nu = VectorXd::Ones(p);
    ch.draws.push_back(st);
  }
  return ch;
}

Index count_lines(const std::string& s) {
  Index n = 0;
  for (char c : s) n += c == '\n';
  return n;
}

}  // namespace

TEST_CASE("quantile rule") {
  const std::vector<double> v{1, 2, 3, 4, 5};
  CHECK(quantile_sorted(v, 0.2) == doctest::Approx(1.8));
  CHECK(quantile_sorted(v, 0.8) == doctest::Approx(4.2));
  CHECK(quantile_sorted(v, 0.0) == 1.0);
  CHECK(quantile_sorted(v, 1.0) == 5.0);
  CHECK(quantile_sorted({7.0}, 0.3) == 7.0);
  CHECK_THROWS_AS(quantile_sorted({}, 0.5), ParameterError);
  CHECK_THROWS_AS(quantile_sorted(v, 1.5), ParameterError);
}

TEST_CASE("interval on draws 1..5 at level 0.6") {
  const SummaryMaps s = summarize(chain_of({3, 1, 5, 2, 4}), 0.6);
  CHECK(s.beta_ci_lo(0, 0) == doctest::Approx(1.8));
  CHECK(s.beta_ci_hi(0, 0) == doctest::Approx(4.2));
  CHECK(s.beta_mean(0, 0) == doctest::Approx(3.0));
  CHECK(s.beta_signif(0, 0));
  CHECK(s.lambda_ci_lo(0) == doctest::Approx(1.8));
  CHECK(s.lambda_not_one(0));
  CHECK(s.tau_mean(0) == doctest::Approx(6.0));
}

TEST_CASE("constant chains") {
  for (double v : {0.0, 1.0, -2.5}) {
    const SummaryMaps s = summarize(chain_of(std::vector<double>(10, v)), 0.95);
    CHECK(s.beta_mean(0, 0) == v);
    CHECK(s.beta_ci_lo(0, 0) == v);
    CHECK(s.beta_ci_hi(0, 0) == v);
    CHECK(s.beta_signif(0, 0) == (v != 0.0));
    CHECK(s.lambda_not_one(0) == (v != 1.0));
  }
}

TEST_CASE("errors") {
  CHECK_THROWS_AS(summarize(Chain{}, 0.95), ParameterError);
  CHECK_THROWS_AS(summarize(chain_of({1, 2}), 0.0), ParameterError);
  CHECK_THROWS_AS(summarize(chain_of({1, 2}), 1.0), ParameterError);
}

TEST_CASE("accept rate uses total iterations") {
  Chain ch = chain_of({1, 2, 3, 4}, 1, 2);
  ch.config.iterations = 8;
  ch.lambda_accept = {2, 8};
  const SummaryMaps s = summarize(ch, 0.9);
  CHECK(s.accept_rate(0) == doctest::Approx(0.25));
  CHECK(s.accept_rate(1) == doctest::Approx(1.0));
}

TEST_CASE("level nesting, significance rule, determinism") {
  std::mt19937_64 rng(1);
  const Dataset ds = oracle::small_dataset({3, 3}, 12, 2, rng);
  SamplerConfig cfg;
  cfg.iterations = 300;
  cfg.burn_in = 30;
  cfg.seed = 2;
  const Chain ch = run_chain(ds, default_hyperparams(2), cfg);
  const SummaryMaps narrow = summarize(ch, 0.90);
  const SummaryMaps wide = summarize(ch, 0.99);
  CHECK((wide.beta_ci_lo.array() <= narrow.beta_ci_lo.array()).all());
  CHECK((wide.beta_ci_hi.array() >= narrow.beta_ci_hi.array()).all());
  CHECK((wide.lambda_ci_lo.array() <= narrow.lambda_ci_lo.array()).all());
  CHECK((wide.lambda_ci_hi.array() >= narrow.lambda_ci_hi.array()).all());
  CHECK((narrow.beta_ci_lo.array() <= narrow.beta_ci_hi.array()).all());
  for (Index i = 0; i < narrow.beta_signif.size(); ++i)
    CHECK(narrow.beta_signif(i) == !(narrow.beta_ci_lo(i) <= 0.0 && 0.0 <= narrow.beta_ci_hi(i)));
  for (Index d = 0; d < 9; ++d)
    CHECK(narrow.lambda_not_one(d) == !(narrow.lambda_ci_lo(d) <= 1.0 && 1.0 <= narrow.lambda_ci_hi(d)));
  const SummaryMaps again = summarize(ch, 0.90);
  CHECK((again.beta_signif == narrow.beta_signif).all());
  CHECK((again.lambda_not_one == narrow.lambda_not_one).all());
  CHECK(again.beta_mean == narrow.beta_mean);
}

TEST_CASE("trace report shapes") {
  const Chain ch = chain_of(std::vector<double>(950, 0.5), 4, 3);
  std::ostringstream one;
  trace_report(ch, {1}, one);
  const std::string csv = one.str();
  CHECK(count_lines(csv) == 951);
  CHECK(csv.substr(0, csv.find('\n')) == "draw,voxel,beta0,beta1,beta2,beta3,tau,lambda");
  const std::string row = csv.substr(csv.find('\n') + 1, csv.find('\n', csv.find('\n') + 1) - csv.find('\n') - 1);
  CHECK(std::count(row.begin(), row.end(), ',') == 7);  // 2 keys + 6 values

  std::ostringstream empty;
  trace_report(ch, {}, empty);
  CHECK(count_lines(empty.str()) == 1);

  std::ostringstream bad;
  CHECK_THROWS_AS(trace_report(ch, {3}, bad), DimensionError);
  CHECK_THROWS_AS(trace_report(ch, {-1}, bad), DimensionError);
}

TEST_CASE("total variation") {
  Lattice lat({2, 3});
  VectorXd img(6);
  img << 0, 1, 3, 0, 0, 0;
  // horizontal: |0-1| + |1-3| + 0 + 0; vertical: 0 + 1 + 3
  CHECK(total_variation(lat, img) == doctest::Approx(7.0));
  CHECK(total_variation(lat, VectorXd::Constant(6, 4.0)) == 0.0);
  CHECK_THROWS_AS(total_variation(lat, VectorXd::Zero(5)), DimensionError);
  Lattice cube({2, 2, 2});
  VectorXd c = VectorXd::Zero(8);
  c(0) = 1.0;
  CHECK(total_variation(cube, c) == doctest::Approx(3.0));
}
