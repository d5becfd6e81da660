#ifndef STM_CONFIG_HPP
#define STM_CONFIG_HPP

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "stm/model.hpp"
#include "stm/sampler.hpp"

namespace stm {

/// Flat `key = value` run configuration. Lines starting with '#' are comments.
/// Unknown keys are rejected.
struct RunConfig {
  std::optional<double> c0;  // unset: max(0, 1e-3 - min y)
  double delta0 = 1e-3;
  double gamma0 = 1e-3;
  double n_nu = 1e-3;
  double s_nu_sq = 1.0;
  double a = 3.0;
  double b = 3.0;
  std::vector<double> phi{10.0};  // one value for all covariates, or one per covariate
  double delta_lambda = 0.1;
  double r0 = 2.0;
  Index iterations = 1000;
  Index burn_in = 50;
  Index thin = 1;
  std::uint64_t seed = 0;
  double level = 0.95;
  bool adapt_lambda = true;
  bool joint_moves = false;
  InitStrategy init = InitStrategy::Profile;
  unsigned threads = 1;

  Hyperparams hyperparams(Index p) const;
  SamplerConfig sampler() const;
  /// Round-trips through parse_config exactly.
  std::string to_text() const;
};

RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);

/// One line per key: name, default, meaning.
std::string config_help();

}  // namespace stm

#endif  // STM_CONFIG_HPP
