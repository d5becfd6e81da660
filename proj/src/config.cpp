#include "stm/config.hpp"

#include <charconv>
#include <iomanip>
#include <set>
#include <sstream>

#include "stm/io.hpp"

namespace stm {

namespace {

struct KeyDoc {
  const char* key;
  const char* fallback;
  const char* meaning;
};

// Defaults follow the simulation-study settings.
constexpr KeyDoc kKeys[] = {
    {"c0", "auto", "response shift; auto = max(0, 1e-3 - min y)"},
    {"delta0", "0.001", "tau prior shape is delta0/2"},
    {"gamma0", "0.001", "tau prior rate is gamma0/2"},
    {"n_nu", "0.001", "nu prior shape is n_nu/2"},
    {"s_nu_sq", "1", "nu prior rate is n_nu*s_nu_sq/2"},
    {"a", "3", "lambda prior is U(-a, b)"},
    {"b", "3", "lambda prior is U(-a, b)"},
    {"phi", "10", "GMRF spatial parameter; one value or a comma list with one per covariate"},
    {"delta_lambda", "0.1", "initial standard deviation of the lambda random-walk proposal"},
    {"r0", "2", "neighbourhood radius in voxels"},
    {"iterations", "1000", "total Gibbs sweeps"},
    {"burn_in", "50", "sweeps discarded before retaining draws"},
    {"thin", "1", "keep every thin-th sweep after burn-in"},
    {"seed", "0", "root random seed"},
    {"level", "0.95", "credible level for summaries"},
    {"adapt_lambda", "1", "tune lambda proposal sd toward 0.44 acceptance during burn-in (0 or 1)"},
    {"joint_moves", "0", "add a joint (lambda, beta) shift move after each lambda step (0 or 1)"},
    {"init", "profile", "starting values: profile (per-voxel profile likelihood lambda) or least_squares (lambda = 1)"},
    {"threads", "1", "worker threads for the per-voxel tau and lambda updates"},
};

double parse_double(const std::string& key, std::string_view text) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size())
    throw ConfigError("key '" + key + "': '" + std::string(text) + "' is not a number");
  return v;
}

template <typename Int>
Int parse_int(const std::string& key, std::string_view text) {
  Int v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size())
    throw ConfigError("key '" + key + "': '" + std::string(text) + "' is not an integer");
  return v;
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::string num(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

}  // namespace

Hyperparams RunConfig::hyperparams(Index p) const {
  Hyperparams h;
  h.delta0 = delta0;
  h.gamma0 = gamma0;
  h.n_nu = n_nu;
  h.s_nu_sq = s_nu_sq;
  h.a = a;
  h.b = b;
  h.delta_lambda = delta_lambda;
  h.r0 = r0;
  if (phi.size() == 1) {
    h.phi = VectorXd::Constant(p, phi[0]);
  } else if (static_cast<Index>(phi.size()) == p) {
    h.phi = Eigen::Map<const VectorXd>(phi.data(), p);
  } else {
    throw ConfigError("phi lists " + std::to_string(phi.size()) + " values for " + std::to_string(p) +
                      " covariates");
  }
  try {
    h.validate(p);
  } catch (const ParameterError& e) {
    throw ConfigError(e.what());
  }
  return h;
}

SamplerConfig RunConfig::sampler() const {
  SamplerConfig c;
  c.iterations = iterations;
  c.burn_in = burn_in;
  c.thin = thin;
  c.seed = seed;
  c.adapt_lambda = adapt_lambda;
  c.joint_moves = joint_moves;
  c.init = init;
  c.threads = threads;
  try {
    c.validate();
  } catch (const ParameterError& e) {
    throw ConfigError(e.what());
  }
  return c;
}

std::string RunConfig::to_text() const {
  std::ostringstream os;
  os << "c0 = " << (c0 ? num(*c0) : std::string("auto")) << '\n';
  os << "delta0 = " << num(delta0) << '\n';
  os << "gamma0 = " << num(gamma0) << '\n';
  os << "n_nu = " << num(n_nu) << '\n';
  os << "s_nu_sq = " << num(s_nu_sq) << '\n';
  os << "a = " << num(a) << '\n';
  os << "b = " << num(b) << '\n';
  os << "phi = ";
  for (std::size_t k = 0; k < phi.size(); ++k) os << (k ? "," : "") << num(phi[k]);
  os << '\n';
  os << "delta_lambda = " << num(delta_lambda) << '\n';
  os << "r0 = " << num(r0) << '\n';
  os << "iterations = " << iterations << '\n';
  os << "burn_in = " << burn_in << '\n';
  os << "thin = " << thin << '\n';
  os << "seed = " << seed << '\n';
  os << "level = " << num(level) << '\n';
  os << "adapt_lambda = " << (adapt_lambda ? 1 : 0) << '\n';
  os << "joint_moves = " << (joint_moves ? 1 : 0) << '\n';
  os << "init = " << (init == InitStrategy::Profile ? "profile" : "least_squares") << '\n';
  os << "threads = " << threads << '\n';
  return os.str();
}

RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  std::set<std::string> seen;
  std::istringstream in(text);
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
    const std::string key(trim(line.substr(0, eq)));
    const std::string_view value = trim(line.substr(eq + 1));
    if (!seen.insert(key).second) throw ConfigError("duplicate key '" + key + "'");

    if (key == "c0") {
      if (value == "auto")
        cfg.c0.reset();
      else
        cfg.c0 = parse_double(key, value);
    } else if (key == "delta0") {
      cfg.delta0 = parse_double(key, value);
    } else if (key == "gamma0") {
      cfg.gamma0 = parse_double(key, value);
    } else if (key == "n_nu") {
      cfg.n_nu = parse_double(key, value);
    } else if (key == "s_nu_sq") {
      cfg.s_nu_sq = parse_double(key, value);
    } else if (key == "a") {
      cfg.a = parse_double(key, value);
    } else if (key == "b") {
      cfg.b = parse_double(key, value);
    } else if (key == "phi") {
      cfg.phi.clear();
      std::size_t start = 0;
      while (true) {
        const auto comma = value.find(',', start);
        cfg.phi.push_back(parse_double(key, trim(value.substr(start, comma == std::string_view::npos
                                                                          ? std::string_view::npos
                                                                          : comma - start))));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
      }
    } else if (key == "delta_lambda") {
      cfg.delta_lambda = parse_double(key, value);
    } else if (key == "r0") {
      cfg.r0 = parse_double(key, value);
    } else if (key == "iterations") {
      cfg.iterations = parse_int<Index>(key, value);
    } else if (key == "burn_in") {
      cfg.burn_in = parse_int<Index>(key, value);
    } else if (key == "thin") {
      cfg.thin = parse_int<Index>(key, value);
    } else if (key == "seed") {
      cfg.seed = parse_int<std::uint64_t>(key, value);
    } else if (key == "level") {
      cfg.level = parse_double(key, value);
    } else if (key == "adapt_lambda") {
      const auto v = parse_int<int>(key, value);
      if (v != 0 && v != 1) throw ConfigError("key 'adapt_lambda' must be 0 or 1");
      cfg.adapt_lambda = v == 1;
    } else if (key == "joint_moves") {
      const auto v = parse_int<int>(key, value);
      if (v != 0 && v != 1) throw ConfigError("key 'joint_moves' must be 0 or 1");
      cfg.joint_moves = v == 1;
    } else if (key == "init") {
      if (value == "profile")
        cfg.init = InitStrategy::Profile;
      else if (value == "least_squares")
        cfg.init = InitStrategy::LeastSquares;
      else
        throw ConfigError("key 'init' must be 'profile' or 'least_squares'");
    } else if (key == "threads") {
      cfg.threads = parse_int<unsigned>(key, value);
      if (cfg.threads == 0) throw ConfigError("key 'threads' must be at least 1");
    } else {
      throw ConfigError("unknown key '" + key + "' at line " + std::to_string(line_no));
    }
  }
  if (!(cfg.level > 0.0 && cfg.level < 1.0)) throw ConfigError("level must lie in (0, 1)");
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  try {
    return parse_config(read_text(path));
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  } catch (const FormatError& e) {
    throw ConfigError(e.what());
  }
}

std::string config_help() {
  std::ostringstream os;
  os << "Config file keys (key = value, '#' comments):\n";
  for (const auto& k : kKeys)
    os << "  " << std::left << std::setw(13) << k.key << " default " << std::setw(8) << k.fallback << "  "
       << k.meaning << '\n';
  return os.str();
}

}  // namespace stm
