#ifndef URYSOHN_SOLVER_HPP
#define URYSOHN_SOLVER_HPP

#include <cmath>
#include <optional>
#include <string>
#include <type_traits>
#include <utility>

#include "urysohn/grid.hpp"
#include "urysohn/parallel.hpp"
#include "urysohn/system.hpp"

namespace urysohn {

/// Constants of the contraction condition
///   6 [kappa0^2 + lambda^2 kappa1^2 + lambda^2 rho^2 kappa2^2 mu(E)] < 1.
template <typename Scalar>
struct ContractionReport {
  Scalar kappa0{};
  Scalar kappa1{};
  Scalar kappa2{};
  Scalar mu_E{};
  Scalar condition_value{};
  Scalar contraction_factor{}; // kappa0 + lambda kappa1 + lambda kappa2 rho sqrt(mu(E))
  bool passes = false;
};

/// kappa1 is the quadrature L2 norm of gamma1 over E x E. Failure is reported, not thrown.
template <typename Scalar>
ContractionReport<Scalar> check_condition_2d(const SystemSpec<Scalar>& sys, const GridDiscretization<Scalar>& grid) {
  using std::sqrt;
  ContractionReport<Scalar> r;
  r.kappa0 = sys.gamma0_bound;
  r.kappa2 = sys.gamma2_bound;
  r.mu_E = grid.measure();
  Scalar k1sq(0);
  if (sys.gamma1) {
    for (Index i = 0; i < grid.size(); ++i) {
      Scalar row(0);
      for (Index j = 0; j < grid.size(); ++j) {
        const Scalar g = sys.gamma1(grid.nodes[static_cast<std::size_t>(i)], grid.nodes[static_cast<std::size_t>(j)]);
        row += grid.weights[j] * g * g;
      }
      k1sq += grid.weights[i] * row;
    }
  }
  r.kappa1 = sqrt(k1sq);
  const Scalar lam2 = sys.lambda * sys.lambda;
  r.condition_value = Scalar(6) * (r.kappa0 * r.kappa0 + lam2 * k1sq +
                                   lam2 * sys.rho * sys.rho * r.kappa2 * r.kappa2 * r.mu_E);
  r.contraction_factor = r.kappa0 + sys.lambda * r.kappa1 + sys.lambda * r.kappa2 * sys.rho * sqrt(r.mu_E);
  r.passes = r.condition_value < Scalar(1);
  return r;
}

/// Picard iteration exceeded its sweep budget.
template <typename Scalar>
class NonConvergenceError : public NumericalError {
public:
  NonConvergenceError(const std::string& what, GridFunction<Scalar> last, Scalar gap)
      : NumericalError(what), last_iterate_(std::move(last)), gap_(gap) {}
  const GridFunction<Scalar>& last_iterate() const noexcept { return last_iterate_; }
  Scalar gap() const noexcept { return gap_; }

private:
  GridFunction<Scalar> last_iterate_;
  Scalar gap_;
};

struct SolveOptions {
  double tol = 1e-10;
  Index max_iter = 500;
  unsigned workers = 0; // 0: hardware concurrency
  bool cache_kernel = true;
  Index cache_limit = Index(1) << 25; // max cached K2 entries
};

/// Nystrom discretisation of the system on a midpoint grid, solved by Picard
/// iteration from x0 = 0. The grid is both the collocation set and the
/// integration rule. Reusable across controls.
template <typename Scalar>
class TrajectorySolver {
public:
  TrajectorySolver(SystemSpec<Scalar> system, GridDiscretization<Scalar> grid, SolveOptions options = {})
      : sys_(std::move(system)), grid_(std::move(grid)), opts_(options) {
    sys_.validate();
    if (sys_.domain_dim() != grid_.dim())
      throw ValidationError("grid dimension does not match the system domain");
    report_ = check_condition_2d(sys_, grid_);
    if (!report_.passes)
      throw DomainError("contraction condition fails for system '" + sys_.name +
                        "' (value " + std::to_string(static_cast<double>(report_.condition_value)) + ")");
    const Index N = grid_.size();
    if (opts_.cache_kernel && sys_.k2_state_independent &&
        N * N * sys_.state_dim * sys_.control_dim <= opts_.cache_limit)
      build_cache();
  }

  const SystemSpec<Scalar>& system() const { return sys_; }
  const GridDiscretization<Scalar>& grid() const { return grid_; }
  const ContractionReport<Scalar>& contraction() const { return report_; }
  const SolveOptions& options() const { return opts_; }

  /// lambda * int K2(xi_i, s, .) u(s) ds for state-independent K2, per node.
  GridFunction<Scalar> control_term(const GridFunction<Scalar>& u) const {
    const Index n = sys_.state_dim, m = sys_.control_dim, N = grid_.size();
    if (cached_) {
      const Eigen::Map<const VectorX<Scalar>> flat(u.data(), m * N);
      VectorX<Scalar> out = k2_cache_ * flat;
      return Eigen::Map<GridFunction<Scalar>>(out.data(), n, N);
    }
    GridFunction<Scalar> out(n, N);
    const VectorX<Scalar> zero = VectorX<Scalar>::Zero(n);
    parallel_for(static_cast<std::size_t>(N), opts_.workers, [&](std::size_t i) {
      VectorX<Scalar> acc = VectorX<Scalar>::Zero(n);
      for (Index j = 0; j < N; ++j)
        acc += grid_.weights[j] * (sys_.k2(grid_.nodes[i], grid_.nodes[static_cast<std::size_t>(j)], zero) * u.col(j));
      out.col(static_cast<Index>(i)) = sys_.lambda * acc;
    });
    return out;
  }

  /// Right-hand side of the equation evaluated at x. `fixed_term` is the
  /// precomputed control term when K2 is state-independent.
  GridFunction<Scalar> apply(const GridFunction<Scalar>& x, const GridFunction<Scalar>& u,
                             const std::optional<GridFunction<Scalar>>& fixed_term = std::nullopt) const {
    const Index n = sys_.state_dim, N = grid_.size();
    GridFunction<Scalar> out(n, N);
    const bool need_k2 = !(sys_.k2_state_independent && fixed_term);
    const bool need_k1 = static_cast<bool>(sys_.k1);
    // Columns of x as owning vectors, so evaluators see plain VectorX arguments.
    std::vector<VectorX<Scalar>> xs(static_cast<std::size_t>(N));
    for (Index j = 0; j < N; ++j)
      xs[static_cast<std::size_t>(j)] = x.col(j);
    parallel_for(static_cast<std::size_t>(N), opts_.workers, [&](std::size_t i) {
      const auto& xi = grid_.nodes[i];
      VectorX<Scalar> acc = VectorX<Scalar>::Zero(n);
      if (need_k1 || need_k2) {
        for (Index j = 0; j < N; ++j) {
          const auto& s = grid_.nodes[static_cast<std::size_t>(j)];
          const auto& xj = xs[static_cast<std::size_t>(j)];
          if (need_k1)
            acc += grid_.weights[j] * sys_.k1(xi, s, xj);
          if (need_k2)
            acc += grid_.weights[j] * (sys_.k2(xi, s, xj) * u.col(j));
        }
      }
      VectorX<Scalar> v = sys_.f(xi, xs[i]) + sys_.lambda * acc;
      if (!need_k2)
        v += fixed_term->col(static_cast<Index>(i));
      out.col(static_cast<Index>(i)) = v;
    });
    return out;
  }

  /// L2 norm of x - RHS(x).
  Scalar residual(const GridFunction<Scalar>& x, const GridFunction<Scalar>& u) const {
    check_control(u);
    std::optional<GridFunction<Scalar>> fixed;
    if (sys_.k2_state_independent)
      fixed = control_term(u);
    return l2_distance(x, apply(x, u, fixed), grid_);
  }

  Trajectory<Scalar> solve(const GridFunction<Scalar>& u, std::string control_id = {},
                           const std::optional<GridFunction<Scalar>>& start = std::nullopt) const {
    check_control(u);
    const Index n = sys_.state_dim, N = grid_.size();
    Trajectory<Scalar> traj;
    traj.control_id = std::move(control_id);
    traj.constraint_warning = l2_norm(u, grid_) > sys_.rho * (Scalar(1) + Scalar(1e-12));

    const Scalar L = report_.contraction_factor;
    const Scalar tol = Scalar(opts_.tol);
    const Scalar threshold = L > Scalar(0) ? tol * (Scalar(1) - L) / L : tol;

    std::optional<GridFunction<Scalar>> fixed;
    if (sys_.k2_state_independent)
      fixed = control_term(u);

    GridFunction<Scalar> x = start ? *start : GridFunction<Scalar>::Zero(n, N);
    if (x.rows() != n || x.cols() != N)
      throw ValidationError("start iterate has wrong shape");
    Scalar gap = std::numeric_limits<Scalar>::infinity();
    for (Index k = 1; k <= opts_.max_iter; ++k) {
      GridFunction<Scalar> next = apply(x, u, fixed);
      gap = l2_distance(next, x, grid_);
      x = std::move(next);
      traj.gaps.push_back(gap);
      traj.iterations = k;
      if (gap <= threshold) {
        traj.values = std::move(x);
        traj.residual_l2 = l2_distance(traj.values, apply(traj.values, u, fixed), grid_);
        return traj;
      }
    }
    throw NonConvergenceError<Scalar>("Picard iteration did not converge within " + std::to_string(opts_.max_iter) +
                                          " sweeps (gap " + std::to_string(static_cast<double>(gap)) + ")" +
                                          (traj.control_id.empty() ? "" : " for control " + traj.control_id),
                                      std::move(x), gap);
  }

private:
  void check_control(const GridFunction<Scalar>& u) const {
    if (u.rows() != sys_.control_dim || u.cols() != grid_.size())
      throw ValidationError("control has shape " + std::to_string(u.rows()) + "x" + std::to_string(u.cols()) +
                            ", expected " + std::to_string(sys_.control_dim) + "x" + std::to_string(grid_.size()));
  }

  void build_cache() {
    const Index n = sys_.state_dim, m = sys_.control_dim, N = grid_.size();
    k2_cache_.resize(n * N, m * N);
    const VectorX<Scalar> zero = VectorX<Scalar>::Zero(n);
    parallel_for(static_cast<std::size_t>(N), opts_.workers, [&](std::size_t i) {
      for (Index j = 0; j < N; ++j)
        k2_cache_.block(static_cast<Index>(i) * n, j * m, n, m) =
            (sys_.lambda * grid_.weights[j]) * sys_.k2(grid_.nodes[i], grid_.nodes[static_cast<std::size_t>(j)], zero);
    });
    cached_ = true;
  }

  SystemSpec<Scalar> sys_;
  GridDiscretization<Scalar> grid_;
  SolveOptions opts_;
  ContractionReport<Scalar> report_;
  MatrixX<Scalar> k2_cache_;
  bool cached_ = false;
};

template <typename Scalar>
Trajectory<Scalar> solve_trajectory(const SystemSpec<Scalar>& sys, const GridFunction<std::type_identity_t<Scalar>>& u,
                                    const GridDiscretization<Scalar>& grid, double tol, Index max_iter) {
  SolveOptions opts;
  opts.tol = tol;
  opts.max_iter = max_iter;
  return TrajectorySolver<Scalar>(sys, grid, opts).solve(u);
}

/// L2 norm of x - f(., x) - lambda int [K1 + K2 u] on the grid.
template <typename Scalar>
Scalar residual(const SystemSpec<Scalar>& sys, const GridFunction<std::type_identity_t<Scalar>>& u,
                const GridFunction<std::type_identity_t<Scalar>>& x,
                const GridDiscretization<Scalar>& grid) {
  SolveOptions opts;
  opts.cache_kernel = false;
  return TrajectorySolver<Scalar>(sys, grid, opts).residual(x, u);
}

} // namespace urysohn

#endif // URYSOHN_SOLVER_HPP
