#ifndef STM_GMRF_HPP
#define STM_GMRF_HPP

#include <Eigen/SparseCore>
#include <vector>

#include "stm/lattice.hpp"
#include "stm/types.hpp"

namespace stm {

template <typename Scalar>
using SparseRowMatrix = Eigen::SparseMatrix<Scalar, Eigen::RowMajor>;

/// Structure matrix H of a coefficient image and its spatial parameter phi.
/// The prior precision is nu * (I + phi * H).
///
/// H[d,d]  =  sum over d' in N(d) of w(d,d')^2
/// H[d,d'] = -w(d,d')^2 for d' in N(d), zero otherwise.
template <typename Scalar = double>
struct GmrfStructure {
  SparseRowMatrix<Scalar> H;
  Scalar phi{1};

  Index size() const { return H.rows(); }

  SparseRowMatrix<Scalar> precision() const {
    SparseRowMatrix<Scalar> identity(H.rows(), H.cols());
    identity.setIdentity();
    return identity + phi * H;
  }

  /// beta^T (I + phi H) beta, evaluated without forming I + phi H.
  template <typename Derived>
  Scalar quadratic_form(const Eigen::MatrixBase<Derived>& beta) const {
    return beta.squaredNorm() + phi * beta.dot(H * beta);
  }
};

template <typename Scalar = double>
GmrfStructure<Scalar> build_gmrf_structure(const NeighborhoodGraph& graph, Scalar phi) {
  if (!(phi > Scalar(0))) throw ParameterError("phi must be positive");

  const Index n = graph.size();
  std::vector<Eigen::Triplet<Scalar>> triplets;
  for (Index d = 0; d < n; ++d) {
    const auto& nbrs = graph.adjacency[d];
    const auto& w = graph.weights[d];
    Scalar diag(0);
    for (std::size_t j = 0; j < nbrs.size(); ++j) {
      const Scalar w2 = Scalar(w[j]) * Scalar(w[j]);
      triplets.emplace_back(d, nbrs[j], -w2);
      diag += w2;
    }
    triplets.emplace_back(d, d, diag);
  }

  GmrfStructure<Scalar> s;
  s.H.resize(n, n);
  s.H.setFromTriplets(triplets.begin(), triplets.end());
  s.H.makeCompressed();
  s.phi = phi;
  return s;
}

template <typename Scalar = double>
struct GaussianConditional {
  Scalar mean;
  Scalar precision;
};

/// Full conditional of beta(d) given the rest of the image under
/// N(0, nu^{-1} (I + phi H)^{-1}). Read off the precision matrix:
/// precision = nu (1 + phi H[d,d]), mean = -phi / (1 + phi H[d,d]) * sum_{d' != d} H[d,d'] beta(d').
template <typename Scalar, typename Derived>
GaussianConditional<Scalar> conditional_params(const GmrfStructure<Scalar>& s, Scalar nu,
                                               const Eigen::MatrixBase<Derived>& beta_image,
                                               Index d) {
  if (!(nu > Scalar(0))) throw ParameterError("nu must be positive");
  Scalar diag(0);
  Scalar off(0);
  for (typename SparseRowMatrix<Scalar>::InnerIterator it(s.H, d); it; ++it) {
    if (it.col() == d)
      diag = it.value();
    else
      off += it.value() * beta_image(it.col());
  }
  const Scalar scale = Scalar(1) + s.phi * diag;
  return {-s.phi * off / scale, nu * scale};
}

}  // namespace stm

#endif  // STM_GMRF_HPP
