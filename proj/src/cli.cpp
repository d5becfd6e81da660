#include "stm/cli.hpp"

#include <chrono>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "stm/baselines.hpp"
#include "stm/boxcox.hpp"
#include "stm/config.hpp"
#include "stm/io.hpp"
#include "stm/simgen.hpp"
#include "stm/summary.hpp"

#ifndef STM_VERSION
#define STM_VERSION "dev"
#endif

namespace stm::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

json base_meta(const std::string& command, int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return {{"command", command},
          {"version", STM_VERSION},
          {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                        std::to_string(EIGEN_MINOR_VERSION)},
          {"args", args}};
}

void write_meta(const fs::path& dir, const json& meta) { write_text(dir / "meta.json", meta.dump(2) + "\n"); }

std::string hex64(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << v;
  return os.str();
}

struct LoadedData {
  Dataset data;
  RunConfig config;
};

LoadedData load_data(const std::string& data_path, const std::string& cov_path, const std::string& config_path) {
  RunConfig cfg = config_path.empty() ? RunConfig{} : load_config(config_path);
  const VolumeFile vol = read_volume(data_path);
  if (vol.dims.size() < 2 || vol.dims.size() > 3) throw FormatError(data_path + ": response volume must be 2D or 3D");
  MatrixXd X = load_covariates(cov_path);
  if (!cfg.c0) cfg.c0 = default_shift(vol.data);
  Dataset ds(volume_lattice(vol), vol.data, std::move(X), *cfg.c0);
  if (!ds.full_rank()) std::cerr << "warning: design matrix is not of full column rank\n";
  return {std::move(ds), std::move(cfg)};
}

std::vector<Index> parse_index_list(const std::string& text) {
  std::vector<Index> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      std::size_t used = 0;
      const long long v = std::stoll(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      out.push_back(static_cast<Index>(v));
    } catch (const std::logic_error&) {
      throw ParameterError("'" + item + "' is not an integer");
    }
  }
  return out;
}

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stod(item));
    } catch (const std::logic_error&) {
      throw ParameterError("'" + item + "' is not a number");
    }
  }
  return out;
}

int cmd_simulate(std::uint64_t seed, const std::string& out, const std::string& dims, Index n, double sigma,
                 const std::string& levels, Index blocks, int argc, char** argv) {
  const auto start = Clock::now();
  SimScenario sc;
  sc.seed = seed;
  sc.dims = parse_index_list(dims);
  sc.n = n;
  sc.sigma = sigma;
  sc.lambda_levels = parse_double_list(levels);
  sc.lambda_blocks = blocks;
  const SimulatedData sim = gen_dataset(sc);
  const Lattice& lattice = sim.data.lattice();

  const fs::path dir(out);
  write_volume(dir / "data.stmv", make_volume(lattice, sim.data.Y()));
  write_covariates(dir / "covariates.csv", sim.data.X());
  write_volume(dir / "truth" / "beta_true.stmv", make_volume(lattice, sim.beta_true));
  write_volume(dir / "truth" / "lambda_true.stmv", make_volume(lattice, MatrixXd(sim.lambda_true.transpose())));

  json meta = base_meta("simulate", argc, argv);
  meta["seed"] = seed;
  meta["dims"] = sc.dims;
  meta["n"] = sc.n;
  meta["sigma"] = sc.sigma;
  meta["lambda_levels"] = sc.lambda_levels;
  meta["lambda_blocks"] = sc.lambda_blocks;
  meta["retries"] = sim.retries;
  meta["data_fingerprint"] = hex64(sim.data.fingerprint());
  meta["wall_seconds"] = seconds_since(start);
  write_meta(dir, meta);
  return 0;
}

int cmd_fit(const std::string& data, const std::string& cov, const std::string& config, const std::string& out,
            Index checkpoint, int argc, char** argv) {
  const auto start = Clock::now();
  auto [ds, cfg] = load_data(data, cov, config);
  const Hyperparams hp = cfg.hyperparams(ds.covariates());
  const Chain chain = run_chain(ds, hp, cfg.sampler());

  const fs::path dir(out);
  write_chain(dir, chain, ds.lattice(), checkpoint);
  write_text(dir / "config.txt", cfg.to_text());

  double accept = 0.0;
  for (auto a : chain.lambda_accept) accept += static_cast<double>(a);
  accept /= static_cast<double>(chain.lambda_accept.size()) * static_cast<double>(cfg.iterations);

  json meta = base_meta("fit", argc, argv);
  meta["data"] = data;
  meta["covariates"] = cov;
  meta["config"] = cfg.to_text();
  meta["seed"] = cfg.seed;
  meta["c0"] = *cfg.c0;
  meta["data_fingerprint"] = hex64(ds.fingerprint());
  meta["retained_draws"] = chain.draws.size();
  meta["mean_lambda_acceptance"] = accept;
  meta["seconds_per_sweep"] = chain.seconds_per_sweep;
  meta["wall_seconds"] = seconds_since(start);
  write_meta(dir, meta);
  return 0;
}

int cmd_summarize(const std::string& chain_dir, double level, const std::string& out, const std::string& trace,
                  int argc, char** argv) {
  const auto start = Clock::now();
  Lattice lattice({1, 1});
  const Chain chain = read_chain(chain_dir, &lattice);
  const SummaryMaps maps = summarize(chain, level);
  const fs::path dir(out);
  write_summary(dir, maps, lattice);

  if (!trace.empty()) {
    std::ostringstream csv;
    trace_report(chain, parse_index_list(trace), csv);
    write_text(dir / "trace.csv", csv.str());
  }

  std::size_t signif = 0;
  for (Index i = 0; i < maps.beta_signif.size(); ++i) signif += maps.beta_signif(i) ? 1 : 0;
  json meta = base_meta("summarize", argc, argv);
  meta["method"] = "stm";
  meta["level"] = level;
  meta["draws"] = chain.draws.size();
  meta["significant_cells"] = signif;
  meta["lambda_not_one_fraction"] = maps.lambda_not_one.cast<double>().mean();
  meta["wall_seconds"] = seconds_since(start);
  write_meta(dir, meta);
  return 0;
}

int cmd_baseline(const std::string& method_name, const std::string& data, const std::string& cov,
                 const std::string& config, const std::string& out, int argc, char** argv) {
  const auto start = Clock::now();
  const BaselineMethod method = parse_baseline_method(method_name);
  auto [ds, cfg] = load_data(data, cov, config);

  json meta = base_meta("baseline", argc, argv);
  BaselineResult result;
  if (method == BaselineMethod::Ols) {
    result = fit_ols(ds);
  } else {
    const Hyperparams hp = cfg.hyperparams(ds.covariates());
    const Chain chain = fixed_lambda_chain(ds, hp, cfg.sampler());
    result.method = method;
    result.beta_est = MatrixXd::Zero(ds.covariates(), ds.voxels());
    for (const auto& st : chain.draws) result.beta_est += st.beta;
    result.beta_est /= static_cast<double>(chain.draws.size());
    meta["config"] = cfg.to_text();
    meta["seed"] = cfg.seed;
    meta["seconds_per_sweep"] = chain.seconds_per_sweep;
  }
  const fs::path dir(out);
  write_volume(dir / "beta_mean.stmv", make_volume(ds.lattice(), result.beta_est));
  meta["method"] = to_string(method);
  meta["data_fingerprint"] = hex64(ds.fingerprint());
  meta["wall_seconds"] = seconds_since(start);
  write_meta(dir, meta);
  return 0;
}

std::string method_name(const fs::path& dir) {
  const fs::path meta = dir / "meta.json";
  if (fs::exists(meta)) {
    try {
      const json j = json::parse(read_text(meta));
      if (j.contains("method")) return j["method"].get<std::string>();
    } catch (const json::exception&) {
    }
  }
  return dir.filename().empty() ? dir.parent_path().filename().string() : dir.filename().string();
}

int cmd_compare(const std::string& truth, const std::vector<std::string>& estimates, const std::string& out) {
  const fs::path truth_dir(truth);
  const VolumeFile beta_true = read_volume(truth_dir / "beta_true.stmv");
  const bool have_lambda = fs::exists(truth_dir / "lambda_true.stmv");
  const VolumeFile lambda_true = have_lambda ? read_volume(truth_dir / "lambda_true.stmv") : VolumeFile{};

  std::ostringstream csv;
  csv << "method,parameter,rmse\n";
  csv << std::setprecision(10);
  for (const auto& e : estimates) {
    const fs::path dir(e);
    const std::string name = method_name(dir);
    const VolumeFile est = read_volume(dir / "beta_mean.stmv");
    if (est.dims != beta_true.dims) throw DimensionError(e + ": estimate lattice differs from truth");
    const VectorXd rmse = rmse_rows(est.data, beta_true.data);
    for (Index k = 0; k < rmse.size(); ++k) csv << name << ",beta" << k << ',' << rmse(k) << '\n';
    if (have_lambda && fs::exists(dir / "lambda_mean.stmv")) {
      const VolumeFile lam = read_volume(dir / "lambda_mean.stmv");
      csv << name << ",lambda," << rmse_rows(lam.data, lambda_true.data)(0) << '\n';
    }
  }
  std::cout << csv.str();
  if (!out.empty()) write_text(out, csv.str());
  return 0;
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"Bayesian spatial transformation models on voxel lattices"};
  app.require_subcommand(1);
  app.footer(config_help());
  app.set_version_flag("--version", STM_VERSION);

  std::uint64_t seed = 0;
  std::string out, dims = "32,32", levels = "0.5,1,2";
  Index n = 200, blocks = 4, checkpoint = 0;
  double sigma = 0.3, level = 0.95;
  std::string data, cov, config, chain_dir, trace, method, truth;
  std::vector<std::string> estimates;

  auto* sim = app.add_subcommand("simulate", "generate a synthetic dataset with ground truth");
  sim->add_option("--seed", seed, "random seed")->required();
  sim->add_option("--out", out, "output directory")->required();
  sim->add_option("--dims", dims, "lattice size, e.g. 32,32 or 16,16,8")->capture_default_str();
  sim->add_option("--n", n, "number of subjects")->capture_default_str();
  sim->add_option("--sigma", sigma, "noise standard deviation on the transformed scale")->capture_default_str();
  sim->add_option("--lambda-levels", levels, "comma list of lambda values")->capture_default_str();
  sim->add_option("--lambda-blocks", blocks, "lambda blocks per axis")->capture_default_str();

  auto* fit = app.add_subcommand("fit", "run the Gibbs sampler and store the chain");
  fit->add_option("--data", data, "response volume (.stmv)")->required();
  fit->add_option("--covariates", cov, "covariate CSV without intercept")->required();
  fit->add_option("--config", config, "run configuration file");
  fit->add_option("--out", out, "chain output directory")->required();
  fit->add_option("--checkpoint", checkpoint, "retained draws per checkpoint file (0 = one file)");

  auto* sum = app.add_subcommand("summarize", "posterior means, credible intervals and threshold maps");
  sum->add_option("--chain", chain_dir, "chain directory written by fit")->required();
  sum->add_option("--level", level, "credible level")->capture_default_str();
  sum->add_option("--out", out, "output directory")->required();
  sum->add_option("--trace", trace, "comma list of voxel indices for trace.csv");

  auto* base = app.add_subcommand("baseline", "fit a comparison method");
  base->add_option("--method", method, "ols or gmrf-fixed-lambda")->required();
  base->add_option("--data", data, "response volume (.stmv)")->required();
  base->add_option("--covariates", cov, "covariate CSV without intercept")->required();
  base->add_option("--config", config, "run configuration file");
  base->add_option("--out", out, "output directory")->required();

  auto* cmp = app.add_subcommand("compare", "RMSE of coefficient estimates against ground truth");
  cmp->add_option("--truth", truth, "ground-truth directory from simulate")->required();
  cmp->add_option("--estimates", estimates, "directories containing beta_mean.stmv")->required();
  cmp->add_option("--out", out, "also write the CSV here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: usage: " << e.what() << '\n';
    return 2;
  }

  try {
    if (*sim) return cmd_simulate(seed, out, dims, n, sigma, levels, blocks, argc, argv);
    if (*fit) return cmd_fit(data, cov, config, out, checkpoint, argc, argv);
    if (*sum) return cmd_summarize(chain_dir, level, out, trace, argc, argv);
    if (*base) return cmd_baseline(method, data, cov, config, out, argc, argv);
    if (*cmp) return cmd_compare(truth, estimates, out);
  } catch (const Error& e) {
    std::cerr << "error: " << e.kind() << ": " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: internal: " << e.what() << '\n';
    return 1;
  }
  return 1;
}

}  // namespace stm::cli
