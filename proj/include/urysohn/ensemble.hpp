#ifndef URYSOHN_ENSEMBLE_HPP
#define URYSOHN_ENSEMBLE_HPP

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "urysohn/pipeline.hpp"

namespace urysohn {

/// Per-cell choice of ladder level and net point. Level 0 always uses net point 0.
struct CellAssignment {
  std::vector<Index> level;
  std::vector<Index> direction;
  bool operator==(const CellAssignment&) const = default;
};

enum class Generation { enumerated, sampled };

inline const char* to_string(Generation g) { return g == Generation::enumerated ? "enumerated" : "sampled"; }

template <typename Scalar>
struct ControlEnsemble {
  std::vector<PiecewiseConstantControl<Scalar>> controls;
  Generation generation = Generation::enumerated;
  Scalar alpha{};
  Scalar Delta{};
  Scalar delta{};
  Scalar sigma{};

  std::size_t size() const { return controls.size(); }
};

namespace detail {

template <typename Scalar>
struct EnumerationContext {
  const DeltaPartition<Scalar>& part;
  const LevelLadder<Scalar>& ladder;
  Index net_size;
  Scalar budget_slack;
  std::size_t cap;
};

// Number of completions of cells [cell, N) within `budget`, saturating at cap + 1.
template <typename Scalar>
std::size_t count_from(const EnumerationContext<Scalar>& ctx, Index cell, Scalar budget) {
  if (cell == ctx.part.size())
    return 1;
  const Scalar mu = ctx.part.cell_measure(cell);
  std::size_t total = 0;
  for (std::size_t j = 0; j < ctx.ladder.levels.size(); ++j) {
    const Scalar r = ctx.ladder.levels[j];
    const Scalar cost = mu * r * r;
    if (cost > budget + ctx.budget_slack)
      break; // levels ascend, so every later level is infeasible too
    const std::size_t mult = j == 0 ? 1 : static_cast<std::size_t>(ctx.net_size);
    const std::size_t rest = count_from(ctx, cell + 1, budget - cost);
    if (rest > ctx.cap / mult)
      return ctx.cap + 1;
    total += mult * rest;
    if (total > ctx.cap)
      return ctx.cap + 1;
  }
  return total;
}

template <typename Scalar>
void enumerate_from(const EnumerationContext<Scalar>& ctx, Index cell, Scalar budget, CellAssignment& current,
                    std::vector<CellAssignment>& out) {
  if (cell == ctx.part.size()) {
    out.push_back(current);
    return;
  }
  const Scalar mu = ctx.part.cell_measure(cell);
  for (std::size_t j = 0; j < ctx.ladder.levels.size(); ++j) {
    const Scalar r = ctx.ladder.levels[j];
    const Scalar cost = mu * r * r;
    if (cost > budget + ctx.budget_slack)
      break;
    current.level[static_cast<std::size_t>(cell)] = static_cast<Index>(j);
    const Index dirs = j == 0 ? 1 : ctx.net_size;
    for (Index l = 0; l < dirs; ++l) {
      current.direction[static_cast<std::size_t>(cell)] = l;
      enumerate_from(ctx, cell + 1, budget - cost, current, out);
    }
  }
}

} // namespace detail

/// Size of the finite family, or cap + 1 if it has more than cap members.
template <typename Scalar>
std::size_t count_controls(const DeltaPartition<Scalar>& part, const LevelLadder<Scalar>& ladder,
                           const SphereNet<Scalar>& net, Scalar rho, std::size_t cap) {
  const detail::EnumerationContext<Scalar> ctx{part, ladder, net.size(), rho * rho * Scalar(1e-12), cap};
  return detail::count_from(ctx, 0, rho * rho);
}

/// All (level, direction) assignments with sum_i mu(E_i) r_i^2 <= rho^2.
/// Depth-first; a branch stops at the first level whose cost exceeds the
/// remaining budget.
template <typename Scalar>
std::vector<CellAssignment> enumerate_assignments(const DeltaPartition<Scalar>& part, const LevelLadder<Scalar>& ladder,
                                                  const SphereNet<Scalar>& net, Scalar rho, std::size_t cap) {
  const std::size_t count = count_controls(part, ladder, net, rho, cap);
  if (count > cap)
    throw EnumerationTooLarge("finite control family has more than " + std::to_string(cap) +
                                  " members; use sampled controls instead",
                              cap);
  const detail::EnumerationContext<Scalar> ctx{part, ladder, net.size(), rho * rho * Scalar(1e-12), cap};
  std::vector<CellAssignment> out;
  out.reserve(count);
  CellAssignment current{std::vector<Index>(static_cast<std::size_t>(part.size()), 0),
                         std::vector<Index>(static_cast<std::size_t>(part.size()), 0)};
  detail::enumerate_from(ctx, 0, rho * rho, current, out);
  return out;
}

template <typename Scalar>
PiecewiseConstantControl<Scalar> to_control(const CellAssignment& a, const DeltaPartition<Scalar>& part,
                                            const LevelLadder<Scalar>& ladder, const SphereNet<Scalar>& net) {
  PiecewiseConstantControl<Scalar> u;
  u.partition = part;
  u.magnitudes.resize(part.size());
  u.directions.resize(static_cast<std::size_t>(part.size()));
  for (Index i = 0; i < part.size(); ++i) {
    const auto c = static_cast<std::size_t>(i);
    u.magnitudes[i] = ladder.levels[static_cast<std::size_t>(a.level[c])];
    u.directions[c] = net.points[static_cast<std::size_t>(a.direction[c])];
  }
  return u;
}

/// Grid values of an assignment, given the node-to-cell map of the grid.
template <typename Scalar>
GridFunction<Scalar> to_grid(const CellAssignment& a, const std::vector<Index>& owner, const LevelLadder<Scalar>& ladder,
                             const SphereNet<Scalar>& net) {
  GridFunction<Scalar> u(net.dim(), static_cast<Index>(owner.size()));
  for (std::size_t j = 0; j < owner.size(); ++j) {
    const auto c = static_cast<std::size_t>(owner[j]);
    u.col(static_cast<Index>(j)) = ladder.levels[static_cast<std::size_t>(a.level[c])] *
                                   net.points[static_cast<std::size_t>(a.direction[c])];
  }
  return u;
}

template <typename Scalar>
ControlEnsemble<Scalar> enumerate_controls(const DeltaPartition<Scalar>& part, const LevelLadder<Scalar>& ladder,
                                           const SphereNet<Scalar>& net, Scalar rho, std::size_t cap) {
  ControlEnsemble<Scalar> e;
  e.generation = Generation::enumerated;
  e.alpha = ladder.top();
  e.Delta = part.delta;
  e.delta = ladder.step;
  e.sigma = net.sigma;
  for (const auto& a : enumerate_assignments(part, ladder, net, rho, cap))
    e.controls.push_back(to_control(a, part, ladder, net));
  return e;
}

/// Random members of the finite family: cells visited in random order, each
/// taking a uniformly chosen level among those still affordable and a uniformly
/// chosen net point.
template <typename Scalar>
std::vector<CellAssignment> random_assignments(const DeltaPartition<Scalar>& part, const LevelLadder<Scalar>& ladder,
                                               const SphereNet<Scalar>& net, Scalar rho, std::size_t count,
                                               std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const auto N = static_cast<std::size_t>(part.size());
  std::vector<std::size_t> order(N);
  std::vector<CellAssignment> out;
  out.reserve(count);
  for (std::size_t n = 0; n < count; ++n) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), rng);
    CellAssignment a{std::vector<Index>(N, 0), std::vector<Index>(N, 0)};
    Scalar budget = rho * rho;
    for (std::size_t c : order) {
      const Scalar mu = part.cell_measure(static_cast<Index>(c));
      std::size_t jmax = 0;
      while (jmax + 1 < ladder.levels.size() &&
             mu * ladder.levels[jmax + 1] * ladder.levels[jmax + 1] <= budget)
        ++jmax;
      const auto j = std::uniform_int_distribution<std::size_t>(0, jmax)(rng);
      a.level[c] = static_cast<Index>(j);
      if (j > 0) {
        a.direction[c] = std::uniform_int_distribution<Index>(0, net.size() - 1)(rng);
        budget -= mu * ladder.levels[j] * ladder.levels[j];
      }
    }
    out.push_back(std::move(a));
  }
  return out;
}

/// Admissible controls: i.i.d. standard normal node values rescaled to
/// ||u||_2 = t rho with t ~ U[0, 1].
template <typename Scalar>
std::vector<GridFunction<Scalar>> sample_admissible(const SystemSpec<Scalar>& sys, const GridDiscretization<Scalar>& grid,
                                                    std::size_t count, std::uint64_t seed) {
  if (count < 1)
    throw ValidationError("sample count must be >= 1");
  std::mt19937_64 rng(seed);
  std::normal_distribution<Scalar> normal(Scalar(0), Scalar(1));
  std::uniform_real_distribution<Scalar> unit(Scalar(0), Scalar(1));
  std::vector<GridFunction<Scalar>> out;
  out.reserve(count);
  for (std::size_t n = 0; n < count; ++n) {
    GridFunction<Scalar> u(sys.control_dim, grid.size());
    for (Index j = 0; j < u.cols(); ++j)
      for (Index i = 0; i < u.rows(); ++i)
        u(i, j) = normal(rng);
    const Scalar t = unit(rng);
    const Scalar norm = l2_norm(u, grid);
    u *= norm > Scalar(0) ? t * sys.rho / norm : Scalar(0);
    out.push_back(std::move(u));
  }
  return out;
}

/// One trajectory per control, solved concurrently.
template <typename Scalar>
std::vector<Trajectory<Scalar>> trajectory_set(const TrajectorySolver<Scalar>& solver,
                                               const std::vector<GridFunction<Scalar>>& controls, unsigned workers = 0,
                                               const std::string& id_prefix = "u") {
  std::vector<Trajectory<Scalar>> out(controls.size());
  parallel_for(controls.size(), workers, [&](std::size_t i) {
    out[i] = solver.solve(controls[i], id_prefix + std::to_string(i));
  });
  return out;
}

template <typename Scalar>
std::vector<Trajectory<Scalar>> trajectory_set(const SystemSpec<Scalar>& sys, const ControlEnsemble<Scalar>& ensemble,
                                               const GridDiscretization<Scalar>& grid, double tol, unsigned workers = 0) {
  SolveOptions opts;
  opts.tol = tol;
  opts.workers = 1;
  const TrajectorySolver<Scalar> solver(sys, grid, opts);
  std::vector<GridFunction<Scalar>> controls;
  controls.reserve(ensemble.size());
  for (const auto& c : ensemble.controls)
    controls.push_back(c.to_grid(grid));
  return trajectory_set(solver, controls, workers);
}

/// max_a min_b ||a - b||_2
template <typename Scalar>
Scalar directed_hausdorff_l2(const std::vector<GridFunction<Scalar>>& A, const std::vector<GridFunction<Scalar>>& B,
                             const GridDiscretization<Scalar>& grid) {
  if (A.empty() || B.empty())
    throw ValidationError("Hausdorff distance needs nonempty sets");
  Scalar worst(0);
  for (const auto& a : A) {
    Scalar best = std::numeric_limits<Scalar>::infinity();
    for (const auto& b : B) {
      if (a.rows() != b.rows() || a.cols() != grid.size() || b.cols() != grid.size())
        throw ValidationError("trajectories do not share the grid");
      best = std::min(best, l2_distance(a, b, grid));
    }
    worst = std::max(worst, best);
  }
  return worst;
}

template <typename Scalar>
Scalar hausdorff_l2(const std::vector<GridFunction<Scalar>>& A, const std::vector<GridFunction<Scalar>>& B,
                    const GridDiscretization<Scalar>& grid) {
  return std::max(directed_hausdorff_l2(A, B, grid), directed_hausdorff_l2(B, A, grid));
}

template <typename Scalar>
Scalar hausdorff_l2(const std::vector<Trajectory<Scalar>>& A, const std::vector<Trajectory<Scalar>>& B,
                    const GridDiscretization<Scalar>& grid) {
  auto values = [](const std::vector<Trajectory<Scalar>>& set) {
    std::vector<GridFunction<Scalar>> v;
    v.reserve(set.size());
    for (const auto& t : set)
      v.push_back(t.values);
    return v;
  };
  return hausdorff_l2(values(A), values(B), grid);
}

/// Partition, ladder, net and refined grid at or below a schedule's limits.
/// `shrink` divides Delta*, delta* and sigma* (2 gives the halved family).
template <typename Scalar>
struct ApproximationFamily {
  DeltaPartition<Scalar> partition;
  LevelLadder<Scalar> ladder;
  SphereNet<Scalar> net;
  GridDiscretization<Scalar> grid;
};

template <typename Scalar>
ApproximationFamily<Scalar> build_family(const SystemSpec<Scalar>& sys, const ApproxSchedule<Scalar>& sched,
                                         Index resolution, Scalar shrink = Scalar(1)) {
  using std::ceil;
  using std::isfinite;
  if (!(shrink >= Scalar(1)))
    throw ValidationError("shrink factor must be >= 1");
  ApproximationFamily<Scalar> fam;
  const Scalar Delta = isfinite(sched.Delta_star) ? sched.Delta_star / shrink : sys.domain.diameter();
  fam.partition = delta_partition(sys.domain, Delta);
  Index q = 1;
  if (isfinite(sched.delta_star)) {
    const Scalar ratio = ceil(sched.alpha_star * shrink / sched.delta_star);
    if (!(ratio < Scalar(1e9)))
      throw ValidationError("level ladder would be too long");
    q = std::max<Index>(1, static_cast<Index>(ratio));
  }
  fam.ladder = uniform_levels(sched.alpha_star, q);
  const Scalar sigma = isfinite(sched.sigma_star) ? std::min(sched.sigma_star / shrink, Scalar(2)) : Scalar(2);
  fam.net = sphere_net(sys.control_dim, sigma);
  fam.grid = refined_grid_at_least(fam.partition, resolution);
  return fam;
}

struct ExperimentOptions {
  std::size_t sample_count = 200;
  std::size_t cap = 100000;
  std::size_t random_members = 256;
  std::uint64_t seed = 1;
  double tol = 1e-10;
  Index max_iter = 500;
  unsigned workers = 0;
};

/// Worst stage errors over all sampled controls and the number of certificate violations.
template <typename Scalar>
struct StageSummary {
  Scalar max_excess_measure{};
  Scalar max_truncation_sup{};
  Scalar max_steklov_l2_change{};
  Scalar min_eta = std::numeric_limits<Scalar>::infinity();
  Scalar max_cell_sup{};
  Scalar max_magnitude_sup{};
  Scalar max_direction_sup{};
  Index truncation_violations = 0;
  Index cell_violations = 0;
  Index magnitude_violations = 0;
  Index direction_violations = 0;
  Index resource_violations = 0;
  Index membership_violations = 0;
};

template <typename Scalar>
struct ExperimentReport {
  Scalar epsilon{};
  Scalar c_star{};
  Scalar bound{};
  Scalar sampled_max_distance{};
  Scalar reverse_distance{}; // finite set lies inside the trajectory set
  Generation mode = Generation::enumerated;
  std::size_t finite_set_size = 0;
  std::size_t sample_count = 0;
  Index partition_cells = 0;
  Index ladder_levels = 0;
  Index net_size = 0;
  Index grid_nodes = 0;
  Scalar max_finite_residual{};
  Index residual_violations = 0;
  StageSummary<Scalar> stages;
  double wall_time = 0.0;
  bool passed = false;
};

/// Checks the approximation bound on sampled admissible controls.
///
/// The finite trajectory set is the full family when it has at most `cap`
/// members; otherwise it is the pipeline images of the samples plus
/// `random_members` random family members. Each sample's distance to that set
/// is recorded; the report passes when the largest is <= (c*+1) eps + 2 tol.
/// Sampling can only under-report the left-hand side of the inequality.
template <typename Scalar>
ExperimentReport<Scalar> verify_theorem(const SystemSpec<Scalar>& sys, const BoundReport<Scalar>& consts,
                                        const ApproxSchedule<Scalar>& sched, const ApproximationFamily<Scalar>& fam,
                                        const ExperimentOptions& opt) {
  const auto start = std::chrono::steady_clock::now();
  ExperimentReport<Scalar> rep;
  rep.epsilon = sched.epsilon;
  rep.c_star = consts.c_star;
  rep.bound = (consts.c_star + Scalar(1)) * sched.epsilon;
  rep.sample_count = opt.sample_count;
  rep.partition_cells = fam.partition.size();
  rep.ladder_levels = fam.ladder.q() + 1;
  rep.net_size = fam.net.size();
  rep.grid_nodes = fam.grid.size();
  const Scalar tol = Scalar(opt.tol);

  SolveOptions so;
  so.tol = opt.tol;
  so.max_iter = opt.max_iter;
  so.workers = 1;
  const TrajectorySolver<Scalar> solver(sys, fam.grid, so);
  const auto owner = cell_of_nodes(fam.grid, fam.partition);

  const auto samples = sample_admissible(sys, fam.grid, opt.sample_count, opt.seed);
  std::vector<PipelineResult<Scalar>> images(samples.size());
  parallel_for(samples.size(), opt.workers, [&](std::size_t i) {
    images[i] = full_pipeline(samples[i], fam.grid, sched, fam.partition, fam.ladder, fam.net, 1);
  });
  auto& st = rep.stages;
  for (const auto& img : images) {
    const auto& c = img.certificate;
    st.max_excess_measure = std::max(st.max_excess_measure, c.excess_measure);
    st.max_truncation_sup = std::max(st.max_truncation_sup, c.truncation_sup);
    st.max_steklov_l2_change = std::max(st.max_steklov_l2_change, c.steklov_l2_change);
    st.min_eta = std::min(st.min_eta, c.eta);
    st.max_cell_sup = std::max(st.max_cell_sup, c.cell_sup);
    st.max_magnitude_sup = std::max(st.max_magnitude_sup, c.magnitude_sup);
    st.max_direction_sup = std::max(st.max_direction_sup, c.direction_sup);
    st.truncation_violations += !c.truncation_ok();
    st.cell_violations += !c.cell_ok();
    st.magnitude_violations += !c.magnitude_ok();
    st.direction_violations += !c.direction_ok();
    st.resource_violations += c.output_resource > sys.rho * sys.rho * (Scalar(1) + Scalar(1e-12));
    st.membership_violations += !is_member(img.control, fam.ladder, fam.net, sys.rho);
  }

  // Finite family as grid controls, generated lazily per index.
  std::vector<CellAssignment> assignments;
  std::size_t image_count = 0;
  if (count_controls(fam.partition, fam.ladder, fam.net, sys.rho, opt.cap) <= opt.cap) {
    rep.mode = Generation::enumerated;
    assignments = enumerate_assignments(fam.partition, fam.ladder, fam.net, sys.rho, opt.cap);
  } else {
    rep.mode = Generation::sampled;
    image_count = images.size();
    assignments = random_assignments(fam.partition, fam.ladder, fam.net, sys.rho, opt.random_members,
                                     opt.seed ^ 0x9e3779b97f4a7c15ULL);
  }
  rep.finite_set_size = image_count + assignments.size();
  auto finite_control = [&](std::size_t i) {
    return i < image_count ? images[i].control.to_grid(fam.grid)
                           : to_grid(assignments[i - image_count], owner, fam.ladder, fam.net);
  };

  const auto sample_traj = trajectory_set(solver, samples, opt.workers, "sample");

  // Stream the finite set: each chunk keeps its own running minima, merged by
  // min, which is independent of the chunking.
  const unsigned workers = opt.workers == 0 ? default_workers() : opt.workers;
  const std::size_t total = rep.finite_set_size;
  const std::size_t chunks = std::max<std::size_t>(1, std::min<std::size_t>(workers, total));
  std::vector<std::vector<Scalar>> chunk_min(chunks, std::vector<Scalar>(samples.size(), std::numeric_limits<Scalar>::infinity()));
  std::vector<Scalar> chunk_residual(chunks, Scalar(0));
  std::vector<Index> chunk_violations(chunks, 0);
  const std::size_t per_chunk = (total + chunks - 1) / chunks;
  parallel_for(chunks, workers, [&](std::size_t c) {
    const std::size_t begin = c * per_chunk;
    const std::size_t end = std::min(total, begin + per_chunk);
    for (std::size_t i = begin; i < end; ++i) {
      const auto traj = solver.solve(finite_control(i), "finite" + std::to_string(i));
      chunk_residual[c] = std::max(chunk_residual[c], traj.residual_l2);
      chunk_violations[c] += traj.residual_l2 > tol;
      for (std::size_t s = 0; s < samples.size(); ++s)
        chunk_min[c][s] = std::min(chunk_min[c][s], l2_distance(sample_traj[s].values, traj.values, fam.grid));
    }
  });
  for (std::size_t c = 0; c < chunks; ++c) {
    rep.max_finite_residual = std::max(rep.max_finite_residual, chunk_residual[c]);
    rep.residual_violations += chunk_violations[c];
  }
  for (std::size_t s = 0; s < samples.size(); ++s) {
    Scalar best = std::numeric_limits<Scalar>::infinity();
    for (std::size_t c = 0; c < chunks; ++c)
      best = std::min(best, chunk_min[c][s]);
    rep.sampled_max_distance = std::max(rep.sampled_max_distance, best);
  }
  rep.reverse_distance = Scalar(0);
  rep.passed = rep.sampled_max_distance <= rep.bound + Scalar(2) * tol;
  rep.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

/// Default R*: the largest Lipschitz estimate seen after truncating sampled
/// controls at alpha and Steklov-averaging them with radius diam(E)/8,
/// rounded up to an integer.
template <typename Scalar>
Scalar estimate_R_star(const SystemSpec<Scalar>& sys, const GridDiscretization<Scalar>& grid, Scalar alpha,
                       std::size_t samples, std::uint64_t seed, unsigned workers = 0) {
  using std::ceil;
  const Scalar eta = grid.domain.diameter() / Scalar(8);
  const auto controls = sample_admissible(sys, grid, samples, seed);
  std::vector<Scalar> lips(controls.size());
  parallel_for(controls.size(), workers, [&](std::size_t i) {
    const auto t = truncate_control(controls[i], grid, alpha);
    lips[i] = lipschitz_estimate(steklov_average(t.control, grid, eta).control, grid);
  });
  const Scalar worst = *std::max_element(lips.begin(), lips.end());
  return std::max(Scalar(1), ceil(worst));
}

} // namespace urysohn

#endif // URYSOHN_ENSEMBLE_HPP
