#include "stm/simgen.hpp"

#include <cmath>
#include <random>

#include "stm/boxcox.hpp"

namespace stm {

MatrixXd gen_covariates(Index n, Xoshiro256& rng) {
  if (n < 1) throw ParameterError("need at least one subject");
  MatrixXd X(n, 4);
  std::normal_distribution<double> normal(5.0, 1.0);
  std::uniform_int_distribution<int> category(1, 3);
  for (Index i = 0; i < n; ++i) {
    const int c = category(rng);
    X(i, 0) = 1.0;
    X(i, 1) = normal(rng);
    X(i, 2) = (c == 2 ? 1.0 : 0.0) - (c == 1 ? 1.0 : 0.0);
    X(i, 3) = (c == 3 ? 1.0 : 0.0) - (c == 1 ? 1.0 : 0.0);
  }
  return X;
}

MatrixXd beta_templates(const Lattice& lattice) {
  const auto& dims = lattice.dims();
  MatrixXd beta = MatrixXd::Zero(4, lattice.size());
  for (Index d = 0; d < lattice.size(); ++d) {
    const Coord c = lattice.coordinates(d);
    const double u = (static_cast<double>(c[0]) + 0.5) / static_cast<double>(dims[0]);
    const double v = (static_cast<double>(c[1]) + 0.5) / static_cast<double>(dims[1]);
    const double r = std::hypot(u - 0.5, v - 0.5);
    beta(0, d) = r < 0.25 ? 1.0 : 0.0;
    beta(1, d) = 2.0 + ((u >= 0.2 && u < 0.8 && v >= 0.3 && v < 0.6) ? 1.0 : 0.0);
    beta(2, d) = (std::abs(u - 0.5) < 0.1 || std::abs(v - 0.5) < 0.1) ? 1.0 : 0.0;
    beta(3, d) = (r >= 0.2 && r < 0.4) ? -1.0 : 0.0;
  }
  return beta;
}

VectorXd lambda_field(const Lattice& lattice, const std::vector<double>& levels, Index blocks,
                      const RandomStreams& streams) {
  if (levels.empty()) throw ParameterError("lambda field needs at least one level");
  if (blocks < 1) throw ParameterError("lambda field needs at least one block per axis");
  const auto& dims = lattice.dims();

  Index block_count = 1;
  for (std::size_t a = 0; a < dims.size(); ++a) block_count *= blocks;
  auto rng = streams.engine(Stream::LambdaField, 0, 0);
  std::uniform_int_distribution<std::size_t> pick(0, levels.size() - 1);
  std::vector<double> block_level(block_count);
  for (auto& l : block_level) l = levels[pick(rng)];

  VectorXd field(lattice.size());
  for (Index d = 0; d < lattice.size(); ++d) {
    const Coord c = lattice.coordinates(d);
    Index b = 0;
    for (std::size_t a = 0; a < dims.size(); ++a) b = b * blocks + c[a] * blocks / dims[a];
    field(d) = block_level[b];
  }
  return field;
}

SimulatedData gen_dataset(const SimScenario& sc) {
  constexpr Index kMaxRetries = 1'000'000;
  if (!(sc.sigma >= 0.0)) throw ParameterError("sigma must be non-negative");
  Lattice lattice(sc.dims);
  const RandomStreams streams(sc.seed);

  auto cov_rng = streams.engine(Stream::Covariates, 0, 0);
  MatrixXd X = gen_covariates(sc.n, cov_rng);
  MatrixXd beta = beta_templates(lattice);
  VectorXd lambda = lambda_field(lattice, sc.lambda_levels, sc.lambda_blocks, streams);

  const MatrixXd mean = X * beta;
  MatrixXd Y(sc.n, lattice.size());
  Index retries = 0;
  for (Index d = 0; d < lattice.size(); ++d) {
    auto rng = streams.engine(Stream::Noise, 0, static_cast<std::uint64_t>(d));
    std::normal_distribution<double> normal;
    const double l = lambda(d);
    for (Index i = 0; i < sc.n; ++i) {
      Index attempts = 0;
      while (true) {
        const double z = mean(i, d) + sc.sigma * normal(rng);
        if (std::abs(l) < kLogBranchTolerance || l * z + 1.0 > 0.0) {
          Y(i, d) = inverse_boxcox(z, l, 0.0);
          break;
        }
        if (++attempts > kMaxRetries)
          throw DomainError("cannot draw a valid response at subject " + std::to_string(i) + ", voxel " +
                            std::to_string(d));
        ++retries;
      }
    }
  }
  return {Dataset(lattice, std::move(Y), std::move(X), 0.0), std::move(beta), std::move(lambda), retries};
}

}  // namespace stm
