#ifndef URYSOHN_PIPELINE_HPP
#define URYSOHN_PIPELINE_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <type_traits>

#include "urysohn/bounds.hpp"
#include "urysohn/control.hpp"

namespace urysohn {

// Control transformation chain that maps an admissible control into the finite
// piecewise-constant family: truncation, Steklov averaging, cell averaging,
// magnitude floor, direction snapping. Each stage reports its measured error
// next to the bound it must respect.

template <typename Scalar>
struct TruncationResult {
  GridFunction<Scalar> control;
  Scalar excess_measure{}; // mu{s : |u(s)| > alpha}
  Scalar sup_change{};
};

/// Radial clipping of |u(s)| to alpha.
template <typename Scalar>
TruncationResult<Scalar> truncate_control(const GridFunction<std::type_identity_t<Scalar>>& u, const GridDiscretization<Scalar>& grid,
                                          Scalar alpha) {
  if (!(alpha > Scalar(0)))
    throw ValidationError("truncation level alpha must be positive");
  if (u.cols() != grid.size())
    throw ValidationError("control does not match the grid");
  TruncationResult<Scalar> r;
  r.control = u;
  for (Index j = 0; j < u.cols(); ++j) {
    const Scalar n = u.col(j).norm();
    if (n > alpha) {
      r.control.col(j) *= alpha / n;
      r.excess_measure += grid.weights[j];
      r.sup_change = std::max(r.sup_change, n - alpha);
    }
  }
  return r;
}

namespace detail {

// Overlap of grid cell j (along one axis) with the open interval (c - eta, c + eta).
template <typename Scalar>
Scalar overlap_1d(Scalar cell_lo, Scalar cell_hi, Scalar centre, Scalar eta) {
  return std::max(Scalar(0), std::min(cell_hi, centre + eta) - std::max(cell_lo, centre - eta));
}

// Calls fn(j) for every node j whose multi-index lies within `reach` of `centre_idx`.
template <typename Scalar, typename Fn>
void for_nodes_in_window(const GridDiscretization<Scalar>& grid, const std::vector<Index>& centre_idx,
                         const std::vector<Index>& reach, Fn&& fn) {
  const std::size_t k = centre_idx.size();
  std::vector<Index> lo(k), hi(k), idx(k);
  for (std::size_t a = 0; a < k; ++a) {
    lo[a] = std::max<Index>(0, centre_idx[a] - reach[a]);
    hi[a] = std::min<Index>(grid.cells_per_axis[a] - 1, centre_idx[a] + reach[a]);
    idx[a] = lo[a];
  }
  while (true) {
    fn(grid.linear_index(idx));
    std::size_t a = 0;
    while (a < k && idx[a] == hi[a]) {
      idx[a] = lo[a];
      ++a;
    }
    if (a == k)
      break;
    ++idx[a];
  }
}

template <typename Scalar>
std::vector<Index> window_reach(const GridDiscretization<Scalar>& grid, Scalar eta) {
  using std::ceil;
  std::vector<Index> reach(static_cast<std::size_t>(grid.dim()));
  for (Index a = 0; a < grid.dim(); ++a)
    reach[static_cast<std::size_t>(a)] = static_cast<Index>(ceil(eta / grid.spacing[a])) + 1;
  return reach;
}

// Nearest grid multi-index of a point (clamped to the grid).
template <typename Scalar>
std::vector<Index> nearest_index(const GridDiscretization<Scalar>& grid, const VectorX<Scalar>& p) {
  using std::floor;
  std::vector<Index> idx(static_cast<std::size_t>(grid.dim()));
  for (Index a = 0; a < grid.dim(); ++a) {
    const Index i = static_cast<Index>(floor((p[a] - grid.domain.lower[a]) / grid.spacing[a]));
    idx[static_cast<std::size_t>(a)] = std::clamp<Index>(i, 0, grid.cells_per_axis[static_cast<std::size_t>(a)] - 1);
  }
  return idx;
}

// Averaging weight of node j for a ball centred at p. In one dimension the
// exact overlap of the grid cell with the ball; otherwise the node weight if
// the node lies inside the ball.
template <typename Scalar>
Scalar ball_weight(const GridDiscretization<Scalar>& grid, Index j, const VectorX<Scalar>& p, Scalar eta) {
  const auto& s = grid.nodes[static_cast<std::size_t>(j)];
  if (grid.dim() == 1) {
    const Scalar h = grid.spacing[0];
    return overlap_1d(s[0] - h / Scalar(2), s[0] + h / Scalar(2), p[0], eta);
  }
  return (s - p).norm() < eta ? grid.weights[j] : Scalar(0);
}

} // namespace detail

/// Steklov average at an arbitrary point p: (1/|B(p,eta)|) int_{B(p,eta)} w,
/// with w = 0 outside E and the grid values read as cellwise constants.
template <typename Scalar>
VectorX<Scalar> steklov_value_at(const GridFunction<std::type_identity_t<Scalar>>& w, const GridDiscretization<Scalar>& grid,
                                 const VectorX<Scalar>& p, Scalar eta) {
  using std::pow;
  if (!(eta > Scalar(0)))
    throw ValidationError("Steklov radius must be positive");
  const Scalar ball = unit_ball_volume<Scalar>(grid.dim()) * pow(eta, Scalar(grid.dim()));
  VectorX<Scalar> acc = VectorX<Scalar>::Zero(w.rows());
  detail::for_nodes_in_window(grid, detail::nearest_index(grid, p), detail::window_reach(grid, eta), [&](Index j) {
    const Scalar a = detail::ball_weight(grid, j, p, eta);
    if (a > Scalar(0))
      acc += a * w.col(j);
  });
  return acc / ball;
}

template <typename Scalar>
struct SteklovResult {
  GridFunction<Scalar> control;
  Scalar eta{};
  Scalar normaliser{};       // max(|B(eta)|, largest discrete row mass)
  Scalar lipschitz_bound{};  // 2 |w|_inf |B^{k-1}| / (|B^k| eta)
};

/// Steklov average on every node. The discrete weights are symmetric, and the
/// normaliser is at least every row mass, so the map never increases the sup
/// or L2 norm. In one dimension the normaliser is exactly |B(eta)| = 2 eta.
template <typename Scalar>
SteklovResult<Scalar> steklov_average(const GridFunction<std::type_identity_t<Scalar>>& w, const GridDiscretization<Scalar>& grid,
                                      Scalar eta, unsigned workers = 1) {
  using std::pow;
  if (!(eta > Scalar(0)))
    throw ValidationError("Steklov radius must be positive");
  if (w.cols() != grid.size())
    throw ValidationError("control does not match the grid");
  const Index N = grid.size();
  const Index k = grid.dim();
  const auto reach = detail::window_reach(grid, eta);

  GridFunction<Scalar> sums(w.rows(), N);
  VectorX<Scalar> mass(N);
  parallel_for(static_cast<std::size_t>(N), workers, [&](std::size_t i) {
    const auto& p = grid.nodes[i];
    VectorX<Scalar> acc = VectorX<Scalar>::Zero(w.rows());
    Scalar m(0);
    detail::for_nodes_in_window(grid, grid.multi_index(static_cast<Index>(i)), reach, [&](Index j) {
      const Scalar a = detail::ball_weight(grid, j, p, eta);
      if (a > Scalar(0)) {
        acc += a * w.col(j);
        m += a;
      }
    });
    sums.col(static_cast<Index>(i)) = acc;
    mass[static_cast<Index>(i)] = m;
  });

  SteklovResult<Scalar> r;
  r.eta = eta;
  const Scalar ball = unit_ball_volume<Scalar>(k) * pow(eta, Scalar(k));
  r.normaliser = k == 1 ? ball : std::max(ball, mass.maxCoeff());
  r.control = sums / r.normaliser;
  r.lipschitz_bound = Scalar(2) * sup_norm(w) * unit_ball_volume<Scalar>(k - 1) / (unit_ball_volume<Scalar>(k) * eta);
  return r;
}

/// Largest |u(s1) - u(s2)| / |s1 - s2| over axis-neighbouring nodes.
template <typename Scalar>
Scalar lipschitz_estimate(const GridFunction<std::type_identity_t<Scalar>>& u, const GridDiscretization<Scalar>& grid) {
  if (grid.size() < 2)
    throw ValidationError("Lipschitz estimate needs at least two nodes");
  Scalar best(0);
  for (std::size_t a = 0; a < static_cast<std::size_t>(grid.dim()); ++a) {
    const Index stride = grid.stride(a);
    const Scalar h = grid.spacing[static_cast<Index>(a)];
    for (Index j = 0; j < grid.size(); ++j) {
      if ((j / stride) % grid.cells_per_axis[a] + 1 >= grid.cells_per_axis[a])
        continue;
      best = std::max(best, (u.col(j + stride) - u.col(j)).norm() / h);
    }
  }
  return best;
}

/// Quadrature mean of u over each partition cell.
template <typename Scalar>
PiecewiseConstantControl<Scalar> cell_average(const GridFunction<std::type_identity_t<Scalar>>& u, const GridDiscretization<Scalar>& grid,
                                              const DeltaPartition<Scalar>& part) {
  if (u.cols() != grid.size())
    throw ValidationError("control does not match the grid");
  const auto owner = cell_of_nodes(grid, part);
  MatrixX<Scalar> sums = MatrixX<Scalar>::Zero(u.rows(), part.size());
  VectorX<Scalar> mass = VectorX<Scalar>::Zero(part.size());
  for (Index j = 0; j < grid.size(); ++j) {
    const Index c = owner[static_cast<std::size_t>(j)];
    sums.col(c) += grid.weights[j] * u.col(j);
    mass[c] += grid.weights[j];
  }
  for (Index c = 0; c < part.size(); ++c)
    sums.col(c) /= mass[c];
  return from_cell_values(part, sums);
}

/// Floors each magnitude to the ladder level below it. Magnitudes equal to the
/// top level and zero are kept; directions are untouched.
template <typename Scalar>
PiecewiseConstantControl<Scalar> quantize_magnitude(const PiecewiseConstantControl<Scalar>& u,
                                                    const LevelLadder<Scalar>& ladder) {
  auto out = u;
  const Scalar top = ladder.top();
  for (Index i = 0; i < u.cells(); ++i) {
    const Scalar r = u.magnitudes[i];
    if (r > top * (Scalar(1) + Scalar(1e-12)))
      throw ValidationError("cell magnitude " + std::to_string(static_cast<double>(r)) + " exceeds ladder top " +
                            std::to_string(static_cast<double>(top)));
    out.magnitudes[i] = r >= top ? top : ladder.levels[static_cast<std::size_t>(ladder.floor_index(r))];
  }
  return out;
}

/// Replaces each direction by its nearest net point (lowest index on ties).
/// Zero-magnitude cells take the first net point.
template <typename Scalar>
PiecewiseConstantControl<Scalar> quantize_direction(const PiecewiseConstantControl<Scalar>& u,
                                                    const SphereNet<Scalar>& net) {
  if (u.control_dim() != net.dim())
    throw ValidationError("net dimension does not match the control dimension");
  auto out = u;
  for (Index i = 0; i < u.cells(); ++i) {
    auto& d = out.directions[static_cast<std::size_t>(i)];
    d = u.magnitudes[i] == Scalar(0) ? net.points.front()
                                     : net.points[static_cast<std::size_t>(net.nearest(u.directions[static_cast<std::size_t>(i)]))];
  }
  return out;
}

/// Measured error of every stage with the bound it must satisfy.
template <typename Scalar>
struct PipelineCertificate {
  Scalar alpha{};
  Scalar excess_measure{};
  Scalar tchebyshev_bound{}; // ||u||_2^2 / alpha^2
  Scalar truncation_sup{};

  Scalar eta{};
  Scalar steklov_lipschitz{};
  Scalar steklov_lipschitz_bound{};
  Scalar steklov_l2_change{};

  Scalar lipschitz_input{}; // R-hat of the cell-averaging input, scaled by sqrt(k) for k >= 2
  Scalar partition_diameter{};
  Scalar cell_sup{};

  Scalar level_step{};
  Scalar magnitude_sup{};

  Scalar sigma{};
  Scalar direction_sup{};

  Scalar input_l2{};
  Scalar output_resource{};

  bool truncation_ok() const { return excess_measure <= tchebyshev_bound * (Scalar(1) + Scalar(1e-12)); }
  bool cell_ok() const { return cell_sup <= lipschitz_input * partition_diameter * (Scalar(1) + Scalar(1e-9)) + Scalar(1e-12); }
  bool magnitude_ok() const { return magnitude_sup <= level_step * (Scalar(1) + Scalar(1e-12)); }
  bool direction_ok() const { return direction_sup <= alpha * sigma * (Scalar(1) + Scalar(1e-12)); }
  bool all_ok() const { return truncation_ok() && cell_ok() && magnitude_ok() && direction_ok(); }
};

template <typename Scalar>
struct PipelineResult {
  PiecewiseConstantControl<Scalar> control;
  PipelineCertificate<Scalar> certificate;
};

/// Smallest radius from the ladder diam(E)/2, diam(E)/4, ... whose Steklov
/// average has Lipschitz estimate <= R. Falls back to `fallback` when even the
/// largest radius is too rough.
template <typename Scalar>
Scalar choose_steklov_radius(const GridFunction<std::type_identity_t<Scalar>>& w, const GridDiscretization<Scalar>& grid, Scalar R,
                             Scalar fallback, unsigned workers = 1) {
  const Scalar finest = grid.spacing.maxCoeff();
  Scalar eta = grid.domain.diameter() / Scalar(2);
  Scalar chosen = Scalar(0);
  while (eta >= Scalar(2) * finest) {
    if (lipschitz_estimate(steklov_average(w, grid, eta, workers).control, grid) > R)
      break;
    chosen = eta;
    eta /= Scalar(2);
  }
  if (chosen > Scalar(0))
    return chosen;
  using std::isfinite;
  if (!isfinite(fallback) || !(fallback > Scalar(0)))
    fallback = grid.domain.diameter() / Scalar(2);
  return std::max(fallback, finest);
}

/// Maps an admissible control into the family built from (partition, ladder, net)
/// in the order: truncate at the ladder top, Steklov average, cell average,
/// floor magnitudes, snap directions.
template <typename Scalar>
PipelineResult<Scalar> full_pipeline(const GridFunction<std::type_identity_t<Scalar>>& u, const GridDiscretization<Scalar>& grid,
                                     const ApproxSchedule<Scalar>& sched, const DeltaPartition<Scalar>& part,
                                     const LevelLadder<Scalar>& ladder, const SphereNet<Scalar>& net,
                                     unsigned workers = 1) {
  using std::sqrt;
  const Scalar tol = Scalar(1e-9);
  if (part.max_cell_diameter() > sched.Delta_star * (Scalar(1) + tol))
    throw ValidationError("partition is coarser than Delta*");
  if (ladder.step > sched.delta_star * (Scalar(1) + tol))
    throw ValidationError("level step exceeds delta*");
  if (ladder.top() + tol < sched.alpha_star)
    throw ValidationError("ladder top is below alpha*");
  if (net.sigma > sched.sigma_star * (Scalar(1) + tol))
    throw ValidationError("net radius exceeds sigma*");

  PipelineCertificate<Scalar> cert;
  cert.alpha = ladder.top();
  cert.input_l2 = l2_norm(u, grid);

  const auto trunc = truncate_control(u, grid, cert.alpha);
  cert.excess_measure = trunc.excess_measure;
  cert.tchebyshev_bound = cert.input_l2 * cert.input_l2 / (cert.alpha * cert.alpha);
  cert.truncation_sup = trunc.sup_change;

  const Scalar eta = choose_steklov_radius(trunc.control, grid, sched.R_star, sched.Delta_star / Scalar(2), workers);
  const auto smooth = steklov_average(trunc.control, grid, eta, workers);
  cert.eta = eta;
  cert.steklov_lipschitz = lipschitz_estimate(smooth.control, grid);
  cert.steklov_lipschitz_bound = smooth.lipschitz_bound;
  cert.steklov_l2_change = l2_distance(smooth.control, trunc.control, grid);

  auto averaged = cell_average(smooth.control, grid, part);
  cert.lipschitz_input = cert.steklov_lipschitz * (grid.dim() > 1 ? sqrt(Scalar(grid.dim())) : Scalar(1));
  cert.partition_diameter = part.max_cell_diameter();
  cert.cell_sup = sup_norm(smooth.control - averaged.to_grid(grid));

  auto leveled = quantize_magnitude(averaged, ladder);
  cert.level_step = ladder.step;
  cert.magnitude_sup = averaged.sup_distance(leveled);

  auto snapped = quantize_direction(leveled, net);
  cert.sigma = net.sigma;
  cert.direction_sup = leveled.sup_distance(snapped);
  cert.output_resource = snapped.resource();

  return {std::move(snapped), cert};
}

} // namespace urysohn

#endif // URYSOHN_PIPELINE_HPP
