#ifndef URYSOHN_CONTROL_HPP
#define URYSOHN_CONTROL_HPP

#include <cmath>
#include <vector>

#include "urysohn/levels.hpp"
#include "urysohn/partition.hpp"
#include "urysohn/sphere_net.hpp"

namespace urysohn {

/// u(s) = magnitude_i * direction_i on cell E_i. Zero-magnitude cells carry e_1.
template <typename Scalar>
struct PiecewiseConstantControl {
  DeltaPartition<Scalar> partition;
  VectorX<Scalar> magnitudes;
  std::vector<VectorX<Scalar>> directions;

  Index cells() const { return magnitudes.size(); }
  Index control_dim() const { return directions.empty() ? 0 : directions.front().size(); }

  VectorX<Scalar> value(Index cell) const {
    return magnitudes[cell] * directions[static_cast<std::size_t>(cell)];
  }

  /// sum_i mu(E_i) r_i^2
  Scalar resource() const {
    Scalar total(0);
    for (Index i = 0; i < cells(); ++i)
      total += partition.cell_measure(i) * magnitudes[i] * magnitudes[i];
    return total;
  }

  /// Values at the nodes of a grid that refines the partition.
  GridFunction<Scalar> to_grid(const GridDiscretization<Scalar>& grid) const {
    const auto owner = cell_of_nodes(grid, partition);
    GridFunction<Scalar> out(control_dim(), grid.size());
    for (Index j = 0; j < grid.size(); ++j)
      out.col(j) = value(owner[static_cast<std::size_t>(j)]);
    return out;
  }

  /// Largest pointwise distance between two controls on the same partition.
  Scalar sup_distance(const PiecewiseConstantControl& other) const {
    Scalar d(0);
    for (Index i = 0; i < cells(); ++i)
      d = std::max(d, (value(i) - other.value(i)).norm());
    return d;
  }
};

template <typename Scalar>
VectorX<Scalar> canonical_direction(Index m) {
  VectorX<Scalar> e1 = VectorX<Scalar>::Zero(m);
  e1[0] = Scalar(1);
  return e1;
}

/// Splits per-cell vectors (one column per cell) into magnitude and unit direction.
template <typename Scalar>
PiecewiseConstantControl<Scalar> from_cell_values(const DeltaPartition<Scalar>& part, const MatrixX<Scalar>& values) {
  if (values.cols() != part.size())
    throw ValidationError("need one value per partition cell");
  PiecewiseConstantControl<Scalar> u;
  u.partition = part;
  u.magnitudes.resize(part.size());
  u.directions.resize(static_cast<std::size_t>(part.size()));
  for (Index i = 0; i < part.size(); ++i) {
    const Scalar r = values.col(i).norm();
    u.magnitudes[i] = r;
    u.directions[static_cast<std::size_t>(i)] =
        r > Scalar(0) ? VectorX<Scalar>(values.col(i) / r) : canonical_direction<Scalar>(values.rows());
  }
  return u;
}

/// Membership in the finite family: magnitudes on the ladder, directions in the
/// net (zero cells canonical), resource <= rho^2.
template <typename Scalar>
bool is_member(const PiecewiseConstantControl<Scalar>& u, const LevelLadder<Scalar>& ladder,
               const SphereNet<Scalar>& net, Scalar rho, Scalar tol = Scalar(1e-12)) {
  using std::abs;
  for (Index i = 0; i < u.cells(); ++i) {
    const Scalar r = u.magnitudes[i];
    const bool on_ladder = std::any_of(ladder.levels.begin(), ladder.levels.end(),
                                       [&](Scalar level) { return abs(level - r) <= tol * (Scalar(1) + ladder.top()); });
    if (!on_ladder)
      return false;
    const auto& d = u.directions[static_cast<std::size_t>(i)];
    if (r == Scalar(0)) {
      if ((d - net.points.front()).norm() > tol)
        return false;
      continue;
    }
    const bool in_net = std::any_of(net.points.begin(), net.points.end(),
                                    [&](const auto& b) { return (b - d).norm() <= tol; });
    if (!in_net)
      return false;
  }
  return u.resource() <= rho * rho * (Scalar(1) + tol);
}

} // namespace urysohn

#endif // URYSOHN_CONTROL_HPP
