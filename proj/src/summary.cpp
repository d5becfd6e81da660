#include "stm/summary.hpp"

#include <algorithm>
#include <cmath>

namespace stm {

double quantile_sorted(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) throw ParameterError("quantile of an empty sample");
  if (!(q >= 0.0 && q <= 1.0)) throw ParameterError("quantile level must lie in [0, 1]");
  const double h = static_cast<double>(sorted.size() - 1) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

namespace {

struct Interval {
  double mean, lo, hi;
};

Interval interval(std::vector<double>& values, double alpha) {
  double sum = 0.0;
  for (double v : values) sum += v;
  std::sort(values.begin(), values.end());
  return {sum / static_cast<double>(values.size()), quantile_sorted(values, 0.5 * alpha),
          quantile_sorted(values, 1.0 - 0.5 * alpha)};
}

}  // namespace

SummaryMaps summarize(const Chain& chain, double level) {
  if (chain.draws.empty()) throw ParameterError("cannot summarise an empty chain");
  if (!(level > 0.0 && level < 1.0)) throw ParameterError("credible level must lie in (0, 1)");
  const double alpha = 1.0 - level;
  const Index p = chain.covariates();
  const Index nd = chain.voxels();
  const std::size_t m = chain.draws.size();

  SummaryMaps s;
  s.level = level;
  s.beta_mean.resize(p, nd);
  s.beta_ci_lo.resize(p, nd);
  s.beta_ci_hi.resize(p, nd);
  s.beta_signif.resize(p, nd);
  s.lambda_mean.resize(nd);
  s.lambda_ci_lo.resize(nd);
  s.lambda_ci_hi.resize(nd);
  s.lambda_not_one.resize(nd);
  s.tau_mean.resize(nd);
  s.accept_rate.resize(nd);

  std::vector<double> values(m);
  for (Index d = 0; d < nd; ++d) {
    for (Index k = 0; k < p; ++k) {
      for (std::size_t t = 0; t < m; ++t) values[t] = chain.draws[t].beta(k, d);
      const Interval iv = interval(values, alpha);
      s.beta_mean(k, d) = iv.mean;
      s.beta_ci_lo(k, d) = iv.lo;
      s.beta_ci_hi(k, d) = iv.hi;
      s.beta_signif(k, d) = iv.lo > 0.0 || iv.hi < 0.0;
    }
    for (std::size_t t = 0; t < m; ++t) values[t] = chain.draws[t].lambda(d);
    const Interval iv = interval(values, alpha);
    s.lambda_mean(d) = iv.mean;
    s.lambda_ci_lo(d) = iv.lo;
    s.lambda_ci_hi(d) = iv.hi;
    s.lambda_not_one(d) = iv.lo > 1.0 || iv.hi < 1.0;

    double tau = 0.0;
    for (std::size_t t = 0; t < m; ++t) tau += chain.draws[t].tau(d);
    s.tau_mean(d) = tau / static_cast<double>(m);

    const auto iterations = static_cast<double>(chain.config.iterations);
    const auto accepted = d < static_cast<Index>(chain.lambda_accept.size()) ? chain.lambda_accept[d] : 0;
    s.accept_rate(d) = iterations > 0 ? static_cast<double>(accepted) / iterations : 0.0;
  }
  return s;
}

void trace_report(const Chain& chain, const std::vector<Index>& voxels, std::ostream& out) {
  const Index p = chain.covariates();
  const Index nd = chain.voxels();
  for (Index v : voxels)
    if (v < 0 || v >= nd) throw DimensionError("trace voxel " + std::to_string(v) + " out of range");

  out << "draw,voxel";
  for (Index k = 0; k < p; ++k) out << ",beta" << k;
  out << ",tau,lambda\n";
  if (voxels.empty()) return;

  const auto old_precision = out.precision(17);
  for (std::size_t t = 0; t < chain.draws.size(); ++t) {
    const ModelState& st = chain.draws[t];
    for (Index v : voxels) {
      out << t << ',' << v;
      for (Index k = 0; k < p; ++k) out << ',' << st.beta(k, v);
      out << ',' << st.tau(v) << ',' << st.lambda(v) << '\n';
    }
  }
  out.precision(old_precision);
}

double total_variation(const Lattice& lattice, const VectorXd& image) {
  if (image.size() != lattice.size()) throw DimensionError("image size does not match lattice");
  double tv = 0.0;
  for (Index d = 0; d < lattice.size(); ++d) {
    Coord c = lattice.coordinates(d);
    for (int a = 0; a < lattice.ndim(); ++a) {
      ++c[a];
      if (lattice.contains(c)) tv += std::abs(image(d) - image(lattice.linear_index(c)));
      --c[a];
    }
  }
  return tv;
}

}  // namespace stm
