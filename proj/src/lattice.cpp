#include "stm/lattice.hpp"

#include <algorithm>
#include <cmath>

namespace stm {

Lattice::Lattice(std::vector<Index> dims) : dims_(std::move(dims)) {
  if (dims_.size() < 2 || dims_.size() > 3)
    throw DimensionError("lattice needs 2 or 3 axes, got " + std::to_string(dims_.size()));
  for (Index d : dims_)
    if (d < 1) throw DimensionError("lattice axis length must be positive");

  strides_.assign(dims_.size(), 1);
  for (int a = ndim() - 2; a >= 0; --a) strides_[a] = strides_[a + 1] * dims_[a + 1];
  size_ = strides_[0] * dims_[0];
}

Coord Lattice::coordinates(Index linear) const {
  if (linear < 0 || linear >= size_) throw DimensionError("voxel index out of range");
  Coord c(dims_.size());
  for (std::size_t a = 0; a < dims_.size(); ++a) {
    c[a] = linear / strides_[a];
    linear %= strides_[a];
  }
  return c;
}

bool Lattice::contains(const Coord& coord) const {
  if (coord.size() != dims_.size()) return false;
  for (std::size_t a = 0; a < dims_.size(); ++a)
    if (coord[a] < 0 || coord[a] >= dims_[a]) return false;
  return true;
}

Index Lattice::linear_index(const Coord& coord) const {
  if (!contains(coord)) throw DimensionError("coordinate outside lattice");
  Index linear = 0;
  for (std::size_t a = 0; a < dims_.size(); ++a) linear += coord[a] * strides_[a];
  return linear;
}

Lattice build_lattice(std::vector<Index> dims) { return Lattice(std::move(dims)); }

double GaussianKernel::operator()(double u) const { return u <= r0 ? std::exp(-0.5 * u * u) : 0.0; }

namespace {

// Integer offsets with 0 < |o| <= r0, in lexicographic order.
std::vector<Coord> offsets_within(int ndim, double r0) {
  const Index reach = static_cast<Index>(std::floor(r0));
  const double limit = r0 * r0 * (1.0 + 1e-12);
  std::vector<Coord> out;
  Coord o(ndim, -reach);
  while (true) {
    double sq = 0.0;
    for (Index v : o) sq += static_cast<double>(v * v);
    if (sq > 0.0 && sq <= limit) out.push_back(o);
    int a = ndim - 1;
    while (a >= 0 && o[a] == reach) o[a--] = -reach;
    if (a < 0) break;
    ++o[a];
  }
  return out;
}

}  // namespace

NeighborhoodGraph build_neighborhood(const Lattice& lattice, double r0, const KernelFn& kernel) {
  if (!(r0 > 0.0)) throw ParameterError("neighbourhood radius must be positive");
  const KernelFn weight = kernel ? kernel : KernelFn(GaussianKernel{r0});
  const auto offsets = offsets_within(lattice.ndim(), r0);

  std::vector<double> distance;
  distance.reserve(offsets.size());
  for (const auto& o : offsets) {
    double sq = 0.0;
    for (Index v : o) sq += static_cast<double>(v * v);
    distance.push_back(std::sqrt(sq));
  }

  NeighborhoodGraph g;
  g.r0 = r0;
  g.adjacency.resize(lattice.size());
  g.weights.resize(lattice.size());
  for (Index d = 0; d < lattice.size(); ++d) {
    const Coord c = lattice.coordinates(d);
    Coord nb(c.size());
    // Offsets are lexicographic, so the neighbour indices come out sorted.
    for (std::size_t j = 0; j < offsets.size(); ++j) {
      for (std::size_t a = 0; a < c.size(); ++a) nb[a] = c[a] + offsets[j][a];
      if (!lattice.contains(nb)) continue;
      g.adjacency[d].push_back(lattice.linear_index(nb));
      g.weights[d].push_back(weight(distance[j]));
    }
  }
  return g;
}

}  // namespace stm
