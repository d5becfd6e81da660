#ifndef STM_LATTICE_HPP
#define STM_LATTICE_HPP

#include <functional>
#include <vector>

#include "stm/types.hpp"

namespace stm {

using Coord = std::vector<Index>;

/// Regular 2D or 3D voxel grid. Linear indices follow coordinate-lexicographic
/// order with the last axis varying fastest.
class Lattice {
 public:
  explicit Lattice(std::vector<Index> dims);

  Index size() const { return size_; }
  int ndim() const { return static_cast<int>(dims_.size()); }
  const std::vector<Index>& dims() const { return dims_; }

  Coord coordinates(Index linear) const;
  Index linear_index(const Coord& coord) const;
  bool contains(const Coord& coord) const;

  bool operator==(const Lattice& other) const { return dims_ == other.dims_; }

 private:
  std::vector<Index> dims_;
  std::vector<Index> strides_;
  Index size_ = 0;
};

Lattice build_lattice(std::vector<Index> dims);

/// Weight as a function of Euclidean distance between voxel centres.
using KernelFn = std::function<double(double)>;

/// K(u) = exp(-u^2 / 2) for u <= r0, zero otherwise.
struct GaussianKernel {
  double r0;
  double operator()(double u) const;
};

/// Radius-r0 neighbourhood system with per-edge kernel weights. Adjacency
/// lists are sorted and never contain the voxel itself.
struct NeighborhoodGraph {
  double r0 = 0.0;
  std::vector<std::vector<Index>> adjacency;
  std::vector<std::vector<double>> weights;

  Index size() const { return static_cast<Index>(adjacency.size()); }
};

/// Neighbours are the voxels at Euclidean distance in (0, r0]. Boundary voxels
/// get fewer neighbours; there is no wrap-around. When `kernel` is empty the
/// Gaussian kernel truncated at r0 is used.
NeighborhoodGraph build_neighborhood(const Lattice& lattice, double r0,
                                     const KernelFn& kernel = {});

}  // namespace stm

#endif  // STM_LATTICE_HPP
