#ifndef STM_TESTS_ORACLES_HPP
#define STM_TESTS_ORACLES_HPP

// Reference computations written from the model definition, sharing no code
// path with the library beyond the plain data types.

#include <Eigen/Dense>
#include <cmath>
#include <filesystem>
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "stm/model.hpp"

namespace oracle {

using stm::Index;
using stm::MatrixXd;
using stm::VectorXd;

// Row-major coordinates by repeated division, last axis fastest.
inline std::vector<std::vector<Index>> all_coords(const std::vector<Index>& dims) {
  Index total = 1;
  for (auto d : dims) total *= d;
  std::vector<std::vector<Index>> out(total, std::vector<Index>(dims.size()));
  for (Index lin = 0; lin < total; ++lin) {
    Index rem = lin;
    for (std::size_t a = dims.size(); a-- > 0;) {
      out[lin][a] = rem % dims[a];
      rem /= dims[a];
    }
  }
  return out;
}

// Dense H by comparing every pair of voxel centres.
inline MatrixXd dense_H(const std::vector<Index>& dims, double r0) {
  const auto c = all_coords(dims);
  const Index n = static_cast<Index>(c.size());
  MatrixXd H = MatrixXd::Zero(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) {
      if (i == j) continue;
      double s = 0;
      for (std::size_t a = 0; a < dims.size(); ++a) s += double(c[i][a] - c[j][a]) * double(c[i][a] - c[j][a]);
      const double u = std::sqrt(s);
      if (u > r0 + 1e-12) continue;
      const double w = std::exp(-u * u / 2);
      H(i, j) = -w * w;
      H(i, i) += w * w;
    }
  return H;
}

inline double boxcox(double y, double lam, double c0) {
  if (lam == 0.0) return std::log(y + c0);
  return (std::pow(y + c0, lam) - 1.0) / lam;
}

// log Gamma(shape, rate) density
inline double lgamma_pdf(double x, double a, double b) {
  return a * std::log(b) - std::lgamma(a) + (a - 1) * std::log(x) - b * x;
}

inline double lnormal_pdf(double x, double m, double prec) {
  return 0.5 * std::log(prec / (2 * std::numbers::pi)) - 0.5 * prec * (x - m) * (x - m);
}

// Term-by-term un-normalised log posterior with dense precisions; the constant
// log det(I + phi H) is left out to match the library's convention.
inline double log_joint(const stm::Dataset& ds, const stm::ModelState& st, const std::vector<MatrixXd>& H,
                        const stm::Hyperparams& hp) {
  const Index n = ds.subjects(), nd = ds.voxels(), p = ds.covariates();
  double total = 0;
  for (Index d = 0; d < nd; ++d) {
    if (!(st.lambda(d) > -hp.a && st.lambda(d) < hp.b)) return -std::numeric_limits<double>::infinity();
    for (Index i = 0; i < n; ++i) {
      const double y = ds.Y()(i, d);
      double xb = 0;
      for (Index k = 0; k < p; ++k) xb += ds.X()(i, k) * st.beta(k, d);
      const double r = boxcox(y, st.lambda(d), ds.c0()) - xb;
      total += 0.5 * std::log(st.tau(d) / (2 * std::numbers::pi)) - 0.5 * st.tau(d) * r * r +
               (st.lambda(d) - 1) * std::log(y + ds.c0());
    }
    total += lgamma_pdf(st.tau(d), hp.delta0 / 2, hp.gamma0 / 2);
    total += -std::log(hp.a + hp.b);
  }
  for (Index k = 0; k < p; ++k) {
    const VectorXd b = st.beta.row(k).transpose();
    const MatrixXd Q = MatrixXd::Identity(nd, nd) + hp.phi(k) * H[k];
    total += 0.5 * double(nd) * std::log(st.nu(k)) - 0.5 * st.nu(k) * b.dot(Q * b);
    total += lgamma_pdf(st.nu(k), hp.n_nu / 2, hp.n_nu * hp.s_nu_sq / 2);
  }
  return total;
}

// Small positive dataset with an intercept column.
inline stm::Dataset small_dataset(std::vector<Index> dims, Index n, Index p, std::mt19937_64& rng) {
  stm::Lattice lat(dims);
  std::normal_distribution<double> z;
  MatrixXd X(n, p);
  for (Index i = 0; i < n; ++i) {
    X(i, 0) = 1.0;
    for (Index k = 1; k < p; ++k) X(i, k) = z(rng);
  }
  MatrixXd Y(n, lat.size());
  for (Index i = 0; i < n; ++i)
    for (Index d = 0; d < lat.size(); ++d) Y(i, d) = std::exp(0.5 + 0.3 * z(rng));
  return stm::Dataset(lat, Y, X, 0.0);
}

inline stm::ModelState random_state(Index p, Index nd, const stm::Hyperparams& hp, std::mt19937_64& rng) {
  std::normal_distribution<double> z;
  std::uniform_real_distribution<double> u(0.2, 3.0);
  std::uniform_real_distribution<double> l(-hp.a + 0.1, hp.b - 0.1);
  stm::ModelState st;
  st.beta = MatrixXd(p, nd);
  for (Index i = 0; i < st.beta.size(); ++i) st.beta(i) = z(rng);
  st.tau = VectorXd(nd);
  st.lambda = VectorXd(nd);
  for (Index d = 0; d < nd; ++d) {
    st.tau(d) = u(rng);
    st.lambda(d) = l(rng);
  }
  st.nu = VectorXd(p);
  for (Index k = 0; k < p; ++k) st.nu(k) = u(rng);
  return st;
}

// Unique scratch directory under the system temp dir.
inline std::filesystem::path scratch(const std::string& tag) {
  namespace fs = std::filesystem;
  static std::random_device rd;
  fs::path p = fs::temp_directory_path() / ("stm_" + tag + "_" + std::to_string(rd()));
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

}  // namespace oracle

#endif
