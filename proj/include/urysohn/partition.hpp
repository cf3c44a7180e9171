#ifndef URYSOHN_PARTITION_HPP
#define URYSOHN_PARTITION_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "urysohn/grid.hpp"

namespace urysohn {

/// Finite partition of a box into equal sub-boxes whose diameters are at most delta.
/// Cells are ordered like grid nodes (axis 0 fastest).
template <typename Scalar>
struct DeltaPartition {
  Box<Scalar> domain;
  Scalar delta{};
  std::vector<Index> cells_per_axis;
  std::vector<Box<Scalar>> cells;

  Index size() const { return static_cast<Index>(cells.size()); }
  Scalar cell_measure(Index i) const { return cells[static_cast<std::size_t>(i)].measure(); }
  Scalar max_cell_diameter() const {
    Scalar d(0);
    for (const auto& c : cells)
      d = std::max(d, c.diameter());
    return d;
  }
};

/// Upper bound on the number of cells a partition may have.
inline constexpr Index kMaxPartitionCells = 1 << 22;

template <typename Scalar>
DeltaPartition<Scalar> uniform_partition(const Box<Scalar>& domain, const std::vector<Index>& cells_per_axis,
                                         Scalar delta) {
  const Index k = domain.dim();
  DeltaPartition<Scalar> part;
  part.domain = domain;
  part.delta = delta;
  part.cells_per_axis = cells_per_axis;
  Index total = 1;
  for (Index c : cells_per_axis) {
    if (c < 1)
      throw ValidationError("partition needs at least one cell per axis");
    total *= c;
    if (total > kMaxPartitionCells)
      throw ValidationError("partition would have more than " + std::to_string(kMaxPartitionCells) + " cells");
  }
  const VectorX<Scalar> side = domain.sides();
  part.cells.reserve(static_cast<std::size_t>(total));
  for (Index i = 0; i < total; ++i) {
    Index rest = i;
    VectorX<Scalar> lo(k), hi(k);
    for (Index a = 0; a < k; ++a) {
      const Index n = cells_per_axis[static_cast<std::size_t>(a)];
      const Index j = rest % n;
      rest /= n;
      const Scalar h = side[a] / Scalar(n);
      lo[a] = domain.lower[a] + Scalar(j) * h;
      hi[a] = (j + 1 == n) ? domain.upper[a] : domain.lower[a] + Scalar(j + 1) * h;
    }
    part.cells.emplace_back(std::move(lo), std::move(hi));
  }
  return part;
}

/// Uniform partition with per-axis side side_a / ceil(side_a * sqrt(k) / delta),
/// so every cell has diameter <= delta. delta >= diam(E) yields the single cell E.
template <typename Scalar>
DeltaPartition<Scalar> delta_partition(const Box<Scalar>& domain, Scalar delta) {
  using std::ceil;
  using std::sqrt;
  if (!(delta > Scalar(0)))
    throw ValidationError("delta must be positive");
  const Index k = domain.dim();
  std::vector<Index> counts(static_cast<std::size_t>(k), 1);
  if (delta < domain.diameter()) {
    const Scalar root_k = sqrt(Scalar(k));
    for (Index a = 0; a < k; ++a) {
      const Scalar n = ceil(domain.sides()[a] * root_k / delta);
      if (!(n < Scalar(kMaxPartitionCells)))
        throw ValidationError("delta too small for a finite partition of manageable size");
      counts[static_cast<std::size_t>(a)] = std::max<Index>(1, static_cast<Index>(n));
    }
  }
  return uniform_partition(domain, counts, delta);
}

/// Result of checking the four clauses of a finite delta-partition.
struct PartitionCheck {
  bool cells_inside = false;       // each cell is a subset of E
  bool disjoint_interiors = false; // pairwise
  bool covers = false;             // union equals E (measure and containment)
  bool diameters_ok = false;       // diam(E_i) <= delta
  bool positive_measure = false;
  bool all() const { return cells_inside && disjoint_interiors && covers && diameters_ok && positive_measure; }
};

template <typename Scalar>
PartitionCheck check_partition(const DeltaPartition<Scalar>& part, Scalar rel_tol = Scalar(1e-12)) {
  PartitionCheck r;
  const auto& E = part.domain;
  const Scalar slack = rel_tol * E.diameter();
  r.cells_inside = std::all_of(part.cells.begin(), part.cells.end(), [&](const auto& c) {
    return E.contains(c.lower, slack) && E.contains(c.upper, slack);
  });
  r.positive_measure = std::all_of(part.cells.begin(), part.cells.end(),
                                   [](const auto& c) { return c.measure() > Scalar(0); });
  r.diameters_ok = std::all_of(part.cells.begin(), part.cells.end(),
                               [&](const auto& c) { return c.diameter() <= part.delta * (Scalar(1) + rel_tol); });
  r.disjoint_interiors = true;
  for (std::size_t i = 0; i < part.cells.size() && r.disjoint_interiors; ++i)
    for (std::size_t j = i + 1; j < part.cells.size(); ++j) {
      const auto& a = part.cells[i];
      const auto& b = part.cells[j];
      const VectorX<Scalar> lo = a.lower.cwiseMax(b.lower);
      const VectorX<Scalar> hi = a.upper.cwiseMin(b.upper);
      if (((hi - lo).array() > slack).all()) {
        r.disjoint_interiors = false;
        break;
      }
    }
  Scalar total(0);
  for (const auto& c : part.cells)
    total += c.measure();
  using std::abs;
  r.covers = r.cells_inside && r.disjoint_interiors && abs(total - E.measure()) <= rel_tol * E.measure() * Scalar(10);
  return r;
}

/// Grid whose cells subdivide every partition cell into `refine` cells per axis.
template <typename Scalar>
GridDiscretization<Scalar> refined_grid(const DeltaPartition<Scalar>& part, Index refine) {
  if (refine < 1)
    throw ValidationError("refinement factor must be >= 1");
  std::vector<Index> counts = part.cells_per_axis;
  for (auto& c : counts)
    c *= refine;
  return build_grid(part.domain, counts);
}

/// Smallest per-axis refinement with at least `resolution` grid cells per axis.
template <typename Scalar>
GridDiscretization<Scalar> refined_grid_at_least(const DeltaPartition<Scalar>& part, Index resolution) {
  Index refine = 1;
  for (Index c : part.cells_per_axis)
    refine = std::max(refine, (resolution + c - 1) / c);
  return refined_grid(part, refine);
}

/// For each grid node, the index of the partition cell containing it.
/// Throws unless the grid cells nest exactly inside the partition cells.
template <typename Scalar>
std::vector<Index> cell_of_nodes(const GridDiscretization<Scalar>& grid, const DeltaPartition<Scalar>& part) {
  const Index k = grid.dim();
  if (part.domain.dim() != k)
    throw ValidationError("grid and partition dimensions differ");
  const Scalar tol = Scalar(1e-12) * grid.domain.diameter();
  if ((grid.domain.lower - part.domain.lower).norm() > tol || (grid.domain.upper - part.domain.upper).norm() > tol)
    throw ValidationError("grid and partition cover different boxes");
  std::vector<Index> ratio(static_cast<std::size_t>(k));
  for (Index a = 0; a < k; ++a) {
    const Index g = grid.cells_per_axis[static_cast<std::size_t>(a)];
    const Index p = part.cells_per_axis[static_cast<std::size_t>(a)];
    if (p < 1 || g % p != 0)
      throw ValidationError("grid does not refine the partition on axis " + std::to_string(a));
    ratio[static_cast<std::size_t>(a)] = g / p;
  }
  std::vector<Index> owner(static_cast<std::size_t>(grid.size()));
  for (Index i = 0; i < grid.size(); ++i) {
    const auto idx = grid.multi_index(i);
    Index cell = 0;
    for (Index a = k; a-- > 0;)
      cell = cell * part.cells_per_axis[static_cast<std::size_t>(a)] + idx[static_cast<std::size_t>(a)] / ratio[static_cast<std::size_t>(a)];
    owner[static_cast<std::size_t>(i)] = cell;
  }
  return owner;
}

} // namespace urysohn

#endif // URYSOHN_PARTITION_HPP
