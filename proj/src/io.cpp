#include "stm/io.hpp"

#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "json.hpp"

namespace stm {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr char kMagic[4] = {'S', 'T', 'M', 'V'};

void put_u32(std::string& out, std::uint32_t v) {
  for (int b = 0; b < 4; ++b) out.push_back(static_cast<char>((v >> (8 * b)) & 0xffu));
}

void put_f64(std::string& out, double v) {
  const auto bits = std::bit_cast<std::uint64_t>(v);
  for (int b = 0; b < 8; ++b) out.push_back(static_cast<char>((bits >> (8 * b)) & 0xffu));
}

class Reader {
 public:
  explicit Reader(const std::string& bytes) : bytes_(bytes) {}

  void need(std::size_t n) const {
    if (pos_ + n > bytes_.size()) throw FormatError("volume file truncated");
  }
  std::uint8_t u8() {
    need(1);
    return static_cast<std::uint8_t>(bytes_[pos_++]);
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int b = 0; b < 4; ++b) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes_[pos_ + b])) << (8 * b);
    pos_ += 4;
    return v;
  }
  double f64() {
    need(8);
    std::uint64_t v = 0;
    for (int b = 0; b < 8; ++b) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_ + b])) << (8 * b);
    pos_ += 8;
    return std::bit_cast<double>(v);
  }
  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  const std::string& bytes_;
  std::size_t pos_ = 0;
};

std::string format_double(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    out.push_back(trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

json sampler_to_json(const SamplerConfig& c) {
  return {{"iterations", c.iterations}, {"burn_in", c.burn_in},         {"seed", c.seed},
          {"thin", c.thin},             {"sample_lambda", c.sample_lambda}, {"adapt_lambda", c.adapt_lambda}, {"joint_moves", c.joint_moves},
          {"init", c.init == InitStrategy::Profile ? "profile" : "least_squares"}, {"threads", c.threads}};
}

SamplerConfig sampler_from_json(const json& j) {
  SamplerConfig c;
  c.iterations = j.at("iterations").get<Index>();
  c.burn_in = j.at("burn_in").get<Index>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.thin = j.at("thin").get<Index>();
  c.sample_lambda = j.at("sample_lambda").get<bool>();
  c.adapt_lambda = j.at("adapt_lambda").get<bool>();
  c.joint_moves = j.at("joint_moves").get<bool>();
  c.init = j.at("init").get<std::string>() == "profile" ? InitStrategy::Profile : InitStrategy::LeastSquares;
  c.threads = j.at("threads").get<unsigned>();
  return c;
}

json hyper_to_json(const Hyperparams& h) {
  return {{"delta0", h.delta0},
          {"gamma0", h.gamma0},
          {"n_nu", h.n_nu},
          {"s_nu_sq", h.s_nu_sq},
          {"a", h.a},
          {"b", h.b},
          {"phi", std::vector<double>(h.phi.data(), h.phi.data() + h.phi.size())},
          {"delta_lambda", h.delta_lambda},
          {"r0", h.r0}};
}

Hyperparams hyper_from_json(const json& j) {
  Hyperparams h;
  h.delta0 = j.at("delta0").get<double>();
  h.gamma0 = j.at("gamma0").get<double>();
  h.n_nu = j.at("n_nu").get<double>();
  h.s_nu_sq = j.at("s_nu_sq").get<double>();
  h.a = j.at("a").get<double>();
  h.b = j.at("b").get<double>();
  const auto phi = j.at("phi").get<std::vector<double>>();
  h.phi = Eigen::Map<const VectorXd>(phi.data(), static_cast<Index>(phi.size()));
  h.delta_lambda = j.at("delta_lambda").get<double>();
  h.r0 = j.at("r0").get<double>();
  return h;
}

std::string checkpoint_name(const char* block, std::size_t index) {
  std::ostringstream os;
  os << block << '_' << std::setw(4) << std::setfill('0') << index << ".stmv";
  return os.str();
}

}  // namespace

std::size_t VolumeFile::voxels() const {
  std::size_t n = 1;
  for (auto d : dims) n *= d;
  return n;
}

VolumeFile make_volume(const Lattice& lattice, MatrixXd data) {
  if (data.cols() != lattice.size()) throw DimensionError("volume data width does not match lattice");
  VolumeFile v;
  for (Index d : lattice.dims()) v.dims.push_back(static_cast<std::uint32_t>(d));
  v.n_subjects = static_cast<std::uint32_t>(data.rows());
  v.data = std::move(data);
  return v;
}

Lattice volume_lattice(const VolumeFile& v) {
  std::vector<Index> dims(v.dims.begin(), v.dims.end());
  return Lattice(std::move(dims));
}

std::string encode_volume(const VolumeFile& v) {
  if (v.dims.empty() || v.dims.size() > 255) throw FormatError("volume needs between 1 and 255 axes");
  if (static_cast<std::size_t>(v.data.cols()) != v.voxels() || v.data.rows() != static_cast<Index>(v.n_subjects))
    throw FormatError("volume payload shape does not match its header");
  std::string out(kMagic, 4);
  put_u32(out, VolumeFile::kVersion);
  out.push_back(static_cast<char>(v.dims.size()));
  for (auto d : v.dims) put_u32(out, d);
  put_u32(out, v.n_subjects);
  out.reserve(out.size() + 8 * static_cast<std::size_t>(v.data.size()));
  for (Index i = 0; i < v.data.rows(); ++i)
    for (Index d = 0; d < v.data.cols(); ++d) put_f64(out, v.data(i, d));
  return out;
}

VolumeFile decode_volume(const std::string& bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0) throw FormatError("bad volume magic");
  Reader r(bytes);
  for (int i = 0; i < 4; ++i) r.u8();
  const std::uint32_t version = r.u32();
  if (version != VolumeFile::kVersion) throw FormatError("unsupported volume version " + std::to_string(version));
  VolumeFile v;
  const std::uint8_t ndim = r.u8();
  if (ndim == 0) throw FormatError("volume has no axes");
  for (int a = 0; a < ndim; ++a) {
    const std::uint32_t d = r.u32();
    if (d == 0) throw FormatError("volume axis of length zero");
    v.dims.push_back(d);
  }
  v.n_subjects = r.u32();
  const std::size_t expected = 8 * static_cast<std::size_t>(v.n_subjects) * v.voxels();
  if (r.remaining() != expected)
    throw FormatError("volume payload is " + std::to_string(r.remaining()) + " bytes, expected " +
                      std::to_string(expected));
  v.data.resize(v.n_subjects, static_cast<Index>(v.voxels()));
  for (Index i = 0; i < v.data.rows(); ++i)
    for (Index d = 0; d < v.data.cols(); ++d) v.data(i, d) = r.f64();
  return v;
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot write " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw FormatError("write failed for " + path.string());
}

void write_volume(const fs::path& path, const VolumeFile& v) { write_text(path, encode_volume(v)); }

VolumeFile read_volume(const fs::path& path) {
  try {
    return decode_volume(read_text(path));
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

MatrixXd parse_covariates(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  std::size_t width = 0;
  bool have_header = false;
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split(line, ',');
    if (!have_header) {
      have_header = true;
      width = cells.size();
      continue;
    }
    if (cells.size() != width)
      throw FormatError("ragged row at line " + std::to_string(line_no) + ": " + std::to_string(cells.size()) +
                        " cells, header has " + std::to_string(width));
    std::vector<double> row;
    for (auto cell : cells) {
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (cell.empty() || ec != std::errc() || ptr != cell.data() + cell.size())
        throw FormatError("non-numeric cell '" + std::string(cell) + "' at line " + std::to_string(line_no));
      row.push_back(v);
    }
    rows.push_back(std::move(row));
  }
  if (!have_header) throw FormatError("empty file");
  if (rows.empty()) throw FormatError("no data rows");

  MatrixXd X(static_cast<Index>(rows.size()), static_cast<Index>(width) + 1);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    X(static_cast<Index>(i), 0) = 1.0;
    for (std::size_t j = 0; j < width; ++j) X(static_cast<Index>(i), static_cast<Index>(j) + 1) = rows[i][j];
  }
  return X;
}

MatrixXd load_covariates(const fs::path& path) {
  try {
    return parse_covariates(read_text(path));
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void write_covariates(const fs::path& path, const MatrixXd& X) {
  std::ostringstream os;
  for (Index j = 1; j < X.cols(); ++j) os << (j > 1 ? "," : "") << 'x' << j;
  os << '\n';
  for (Index i = 0; i < X.rows(); ++i) {
    for (Index j = 1; j < X.cols(); ++j) os << (j > 1 ? "," : "") << format_double(X(i, j));
    os << '\n';
  }
  write_text(path, os.str());
}

void write_chain(const fs::path& dir, const Chain& chain, const Lattice& lattice, Index checkpoint_draws) {
  const Index p = chain.covariates();
  const Index nd = lattice.size();
  const auto m = static_cast<Index>(chain.draws.size());
  if (m > 0 && chain.voxels() != nd) throw DimensionError("chain does not match lattice");
  fs::create_directories(dir);

  const Index per = checkpoint_draws > 0 ? checkpoint_draws : std::max<Index>(m, 1);
  json checkpoints = json::array();
  for (Index first = 0, index = 0; first < m; first += per, ++index) {
    const Index count = std::min(per, m - first);
    MatrixXd beta(count * p, nd), tau(count, nd), lambda(count, nd), nu(count, p);
    for (Index t = 0; t < count; ++t) {
      const ModelState& st = chain.draws[first + t];
      beta.middleRows(t * p, p) = st.beta;
      tau.row(t) = st.tau.transpose();
      lambda.row(t) = st.lambda.transpose();
      nu.row(t) = st.nu.transpose();
    }
    json cp = {{"first", first},
               {"count", count},
               {"beta", checkpoint_name("beta", index)},
               {"tau", checkpoint_name("tau", index)},
               {"lambda", checkpoint_name("lambda", index)},
               {"nu", checkpoint_name("nu", index)}};
    write_volume(dir / cp["beta"].get<std::string>(), make_volume(lattice, std::move(beta)));
    write_volume(dir / cp["tau"].get<std::string>(), make_volume(lattice, std::move(tau)));
    write_volume(dir / cp["lambda"].get<std::string>(), make_volume(lattice, std::move(lambda)));
    VolumeFile nu_vol;
    nu_vol.dims = {static_cast<std::uint32_t>(p)};
    nu_vol.n_subjects = static_cast<std::uint32_t>(count);
    nu_vol.data = std::move(nu);
    write_volume(dir / cp["nu"].get<std::string>(), nu_vol);
    checkpoints.push_back(std::move(cp));
  }

  auto counts = [nd](const std::vector<std::uint64_t>& c) {
    MatrixXd m = MatrixXd::Zero(1, nd);
    for (Index d = 0; d < nd && d < static_cast<Index>(c.size()); ++d) m(0, d) = static_cast<double>(c[d]);
    return m;
  };
  auto row = [nd](const VectorXd& v) { return v.size() == nd ? MatrixXd(v.transpose()) : MatrixXd::Zero(1, nd); };
  write_volume(dir / "lambda_accept.stmv", make_volume(lattice, counts(chain.lambda_accept)));
  write_volume(dir / "proposal_sd.stmv", make_volume(lattice, row(chain.proposal_sd)));
  write_volume(dir / "shift_accept.stmv", make_volume(lattice, counts(chain.shift_accept)));
  write_volume(dir / "shift_sd.stmv", make_volume(lattice, row(chain.shift_sd)));

  std::ostringstream fp;
  fp << std::hex << std::setw(16) << std::setfill('0') << chain.data_fingerprint;
  const json index = {{"format", "stm-chain"},
                      {"version", 1},
                      {"dims", lattice.dims()},
                      {"covariates", p},
                      {"draws", m},
                      {"checkpoints", checkpoints},
                      {"lambda_accept", "lambda_accept.stmv"},
                      {"proposal_sd", "proposal_sd.stmv"},
                      {"shift_accept", "shift_accept.stmv"},
                      {"shift_sd", "shift_sd.stmv"},
                      {"sampler", sampler_to_json(chain.config)},
                      {"hyperparams", hyper_to_json(chain.hyperparams)},
                      {"data_fingerprint", fp.str()}};
  write_text(dir / "index.json", index.dump(2) + "\n");
}

Chain read_chain(const fs::path& dir, Lattice* lattice_out) {
  json index;
  try {
    index = json::parse(read_text(dir / "index.json"));
  } catch (const json::exception& e) {
    throw FormatError((dir / "index.json").string() + ": " + e.what());
  }
  try {
    if (index.at("format") != "stm-chain") throw FormatError("not a chain index");
    const Lattice lattice(index.at("dims").get<std::vector<Index>>());
    const Index p = index.at("covariates").get<Index>();
    const Index nd = lattice.size();

    Chain chain;
    chain.config = sampler_from_json(index.at("sampler"));
    chain.hyperparams = hyper_from_json(index.at("hyperparams"));
    chain.data_fingerprint = std::stoull(index.at("data_fingerprint").get<std::string>(), nullptr, 16);
    chain.draws.reserve(index.at("draws").get<std::size_t>());

    auto load = [&](const json& name, Index rows, Index cols) {
      VolumeFile v = read_volume(dir / name.get<std::string>());
      if (v.data.rows() != rows || v.data.cols() != cols)
        throw FormatError(name.get<std::string>() + " has unexpected shape");
      return std::move(v.data);
    };
    for (const auto& cp : index.at("checkpoints")) {
      const Index count = cp.at("count").get<Index>();
      const MatrixXd beta = load(cp.at("beta"), count * p, nd);
      const MatrixXd tau = load(cp.at("tau"), count, nd);
      const MatrixXd lambda = load(cp.at("lambda"), count, nd);
      const MatrixXd nu = load(cp.at("nu"), count, p);
      for (Index t = 0; t < count; ++t) {
        ModelState st;
        st.beta = beta.middleRows(t * p, p);
        st.tau = tau.row(t).transpose();
        st.lambda = lambda.row(t).transpose();
        st.nu = nu.row(t).transpose();
        chain.draws.push_back(std::move(st));
      }
    }
    if (static_cast<Index>(chain.draws.size()) != index.at("draws").get<Index>())
      throw FormatError("checkpoint draw counts do not add up to the index total");

    auto counts = [&](const json& name) {
      const MatrixXd m = load(name, 1, nd);
      std::vector<std::uint64_t> out(nd);
      for (Index d = 0; d < nd; ++d) out[d] = static_cast<std::uint64_t>(m(0, d));
      return out;
    };
    chain.lambda_accept = counts(index.at("lambda_accept"));
    chain.proposal_sd = load(index.at("proposal_sd"), 1, nd).row(0).transpose();
    chain.shift_accept = counts(index.at("shift_accept"));
    chain.shift_sd = load(index.at("shift_sd"), 1, nd).row(0).transpose();
    if (lattice_out) *lattice_out = lattice;
    return chain;
  } catch (const json::exception& e) {
    throw FormatError((dir / "index.json").string() + ": " + e.what());
  }
}

void write_summary(const fs::path& dir, const SummaryMaps& s, const Lattice& lattice) {
  fs::create_directories(dir);
  auto row = [](const auto& v) { return MatrixXd(v.transpose().template cast<double>()); };
  write_volume(dir / "beta_mean.stmv", make_volume(lattice, s.beta_mean));
  write_volume(dir / "beta_ci_lo.stmv", make_volume(lattice, s.beta_ci_lo));
  write_volume(dir / "beta_ci_hi.stmv", make_volume(lattice, s.beta_ci_hi));
  write_volume(dir / "beta_signif.stmv", make_volume(lattice, s.beta_signif.cast<double>().matrix()));
  write_volume(dir / "lambda_mean.stmv", make_volume(lattice, row(s.lambda_mean)));
  write_volume(dir / "lambda_ci_lo.stmv", make_volume(lattice, row(s.lambda_ci_lo)));
  write_volume(dir / "lambda_ci_hi.stmv", make_volume(lattice, row(s.lambda_ci_hi)));
  write_volume(dir / "lambda_not_one.stmv", make_volume(lattice, row(s.lambda_not_one.matrix())));
  write_volume(dir / "tau_mean.stmv", make_volume(lattice, row(s.tau_mean)));
  write_volume(dir / "accept_rate.stmv", make_volume(lattice, row(s.accept_rate)));
}

}  // namespace stm
