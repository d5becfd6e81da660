#ifndef STM_SIMGEN_HPP
#define STM_SIMGEN_HPP

#include <cstdint>
#include <vector>

#include "stm/model.hpp"
#include "stm/rng.hpp"

namespace stm {

struct SimScenario {
  std::vector<Index> dims{32, 32};
  Index n = 200;
  double sigma = 0.3;
  std::vector<double> lambda_levels{0.5, 1.0, 2.0};
  Index lambda_blocks = 4;  // blocks per axis in the lambda partition
  std::uint64_t seed = 0;
};

/// n x 4 design: intercept, N(5,1), and the contrast coding of a uniform
/// three-category draw, x_q = 1(category q) - 1(category 1) for q = 2, 3.
MatrixXd gen_covariates(Index n, Xoshiro256& rng);

/// Built-in coefficient images, 4 x N_D, on normalised voxel-centre coordinates
/// (u, v) in (0,1)^2 taken from the first two axes:
///   0 disk:      1 inside radius 0.25 about (0.5, 0.5), else 0
///   1 rectangle: 3 on [0.2, 0.8) x [0.3, 0.6), else 2
///   2 cross:     1 where |u - 0.5| < 0.1 or |v - 0.5| < 0.1, else 0
///   3 annulus:  -1 where 0.2 <= r < 0.4 about (0.5, 0.5), else 0
/// Image 1 multiplies the N(5,1) covariate. Its floor of 2 keeps the linear
/// predictor inside the inverse transform's domain for lambda in {0.5, 1, 2}
/// and gives every voxel enough spread for lambda to be identified.
MatrixXd beta_templates(const Lattice& lattice);

/// Piecewise-constant lambda field: `blocks` equal blocks per axis, each drawn
/// uniformly from `levels`.
VectorXd lambda_field(const Lattice& lattice, const std::vector<double>& levels, Index blocks,
                      const RandomStreams& streams);

struct SimulatedData {
  Dataset data;
  MatrixXd beta_true;   // 4 x N_D
  VectorXd lambda_true;
  Index retries = 0;    // noise redraws forced by the inverse-transform domain
};

/// z = x' beta_true(d) + sigma * N(0,1), y = inverse Box-Cox at lambda_true(d), c0 = 0.
SimulatedData gen_dataset(const SimScenario& sc);

}  // namespace stm

#endif  // STM_SIMGEN_HPP
