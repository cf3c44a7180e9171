#ifndef URYSOHN_GRID_HPP
#define URYSOHN_GRID_HPP

#include <vector>

#include "urysohn/types.hpp"

namespace urysohn {

/// Tensor-product midpoint rule on a box. Node i has multi-index
/// (i_0, ..., i_{k-1}) with axis 0 varying fastest.
template <typename Scalar>
struct GridDiscretization {
  using Vector = VectorX<Scalar>;

  Box<Scalar> domain;
  std::vector<Index> cells_per_axis;
  Vector spacing;
  std::vector<Vector> nodes;
  Vector weights;

  Index size() const { return static_cast<Index>(nodes.size()); }
  Index dim() const { return domain.dim(); }
  Scalar cell_volume() const { return spacing.prod(); }
  Scalar measure() const { return weights.sum(); }

  std::vector<Index> multi_index(Index node) const {
    std::vector<Index> idx(cells_per_axis.size());
    for (std::size_t a = 0; a < cells_per_axis.size(); ++a) {
      idx[a] = node % cells_per_axis[a];
      node /= cells_per_axis[a];
    }
    return idx;
  }

  Index linear_index(const std::vector<Index>& idx) const {
    Index node = 0;
    for (std::size_t a = cells_per_axis.size(); a-- > 0;)
      node = node * cells_per_axis[a] + idx[a];
    return node;
  }

  /// Stride between neighbouring nodes along an axis in the linear ordering.
  Index stride(std::size_t axis) const {
    Index s = 1;
    for (std::size_t a = 0; a < axis; ++a)
      s *= cells_per_axis[a];
    return s;
  }
};

template <typename Scalar>
GridDiscretization<Scalar> build_grid(const Box<Scalar>& domain, const std::vector<Index>& cells_per_axis) {
  const Index k = domain.dim();
  if (static_cast<Index>(cells_per_axis.size()) != k)
    throw ValidationError("cells_per_axis must have one entry per domain axis");
  for (Index c : cells_per_axis)
    if (c < 1)
      throw ValidationError("cells_per_axis entries must be >= 1");
  if (!((domain.upper - domain.lower).array() > Scalar(0)).all())
    throw ValidationError("degenerate box");

  GridDiscretization<Scalar> grid;
  grid.domain = domain;
  grid.cells_per_axis = cells_per_axis;
  grid.spacing.resize(k);
  Index total = 1;
  for (Index a = 0; a < k; ++a) {
    grid.spacing[a] = (domain.upper[a] - domain.lower[a]) / Scalar(cells_per_axis[a]);
    total *= cells_per_axis[a];
  }
  grid.nodes.resize(static_cast<std::size_t>(total));
  grid.weights = VectorX<Scalar>::Constant(total, grid.spacing.prod());
  for (Index i = 0; i < total; ++i) {
    const auto idx = grid.multi_index(i);
    VectorX<Scalar> p(k);
    for (Index a = 0; a < k; ++a)
      p[a] = domain.lower[a] + (Scalar(idx[a]) + Scalar(0.5)) * grid.spacing[a];
    grid.nodes[static_cast<std::size_t>(i)] = std::move(p);
  }
  return grid;
}

/// Same number of cells on every axis.
template <typename Scalar>
GridDiscretization<Scalar> build_grid(const Box<Scalar>& domain, Index cells) {
  return build_grid(domain, std::vector<Index>(static_cast<std::size_t>(domain.dim()), cells));
}

/// Quadrature value of a scalar integrand sampled at the nodes.
template <typename Scalar, typename Derived>
Scalar integrate(const Eigen::MatrixBase<Derived>& values, const GridDiscretization<Scalar>& grid) {
  return values.derived().dot(grid.weights);
}

/// Componentwise integral of a grid function (one column per node).
template <typename Scalar>
VectorX<Scalar> integrate(const GridFunction<Scalar>& fn, const GridDiscretization<Scalar>& grid) {
  return fn * grid.weights;
}

template <typename Scalar, typename Derived>
Scalar l2_norm(const Eigen::MatrixBase<Derived>& fn, const GridDiscretization<Scalar>& grid) {
  using std::sqrt;
  return sqrt(fn.colwise().squaredNorm().dot(grid.weights.transpose()));
}

template <typename Scalar, typename DerivedA, typename DerivedB>
Scalar l2_distance(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b,
                   const GridDiscretization<Scalar>& grid) {
  using std::sqrt;
  return sqrt((a - b).colwise().squaredNorm().dot(grid.weights.transpose()));
}

/// Largest pointwise Euclidean norm over the nodes.
template <typename Derived>
typename Derived::Scalar sup_norm(const Eigen::MatrixBase<Derived>& fn) {
  using Scalar = typename Derived::Scalar;
  return fn.cols() == 0 ? Scalar(0) : Scalar(fn.colwise().norm().maxCoeff());
}

/// Samples an evaluator s -> R^d on every node.
template <typename Scalar, typename Fn>
GridFunction<Scalar> sample(const GridDiscretization<Scalar>& grid, Index value_dim, Fn&& fn) {
  GridFunction<Scalar> out(value_dim, grid.size());
  for (Index j = 0; j < grid.size(); ++j)
    out.col(j) = fn(grid.nodes[static_cast<std::size_t>(j)]);
  return out;
}

} // namespace urysohn

#endif // URYSOHN_GRID_HPP
