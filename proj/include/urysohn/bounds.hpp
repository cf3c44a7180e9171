#ifndef URYSOHN_BOUNDS_HPP
#define URYSOHN_BOUNDS_HPP

#include <cmath>
#include <limits>
#include <numbers>
#include <optional>

#include "urysohn/solver.hpp"

namespace urysohn {

/// Gronwall-type bound: if y <= h + int psi y with ||psi||_2 < 1/sqrt(2), then
/// ||y||_2 <= sqrt(2 ||h||^2 / (1 - 2 ||psi||^2)).
template <typename Scalar>
Scalar gronwall_bound(Scalar h_norm, Scalar psi_norm) {
  using std::sqrt;
  if (h_norm < Scalar(0) || psi_norm < Scalar(0))
    throw DomainError("gronwall_bound needs nonnegative norms");
  const Scalar denom = Scalar(1) - Scalar(2) * psi_norm * psi_norm;
  if (!(psi_norm < Scalar(1) / std::numbers::sqrt2_v<Scalar>) || !(denom > Scalar(0)))
    throw DomainError("gronwall_bound requires ||psi||_2 < 1/sqrt(2)");
  return sqrt(Scalar(2) * h_norm * h_norm / denom);
}

/// sqrt(2) lambda / (1 - kappa0) * sqrt(kappa1^2 + rho^2 kappa2^2 mu(E)).
template <typename Scalar>
Scalar psi_norm_bound(Scalar kappa0, Scalar kappa1, Scalar kappa2, Scalar lambda, Scalar rho, Scalar mu_E) {
  using std::sqrt;
  const Scalar psi = std::numbers::sqrt2_v<Scalar> * lambda / (Scalar(1) - kappa0) *
                     sqrt(kappa1 * kappa1 + rho * rho * kappa2 * kappa2 * mu_E);
  if (!(psi < Scalar(1) / std::numbers::sqrt2_v<Scalar>))
    throw InconsistencyError("psi bound >= 1/sqrt(2); contraction condition cannot hold");
  return psi;
}

template <typename Scalar>
Scalar psi_norm_bound(const SystemSpec<Scalar>& sys, const GridDiscretization<Scalar>& grid) {
  const auto c = check_condition_2d(sys, grid);
  return psi_norm_bound(c.kappa0, c.kappa1, c.kappa2, sys.lambda, sys.rho, c.mu_E);
}

/// sqrt(2 beta1^2 mu(E) + 2 beta2^2 omega*^2).
template <typename Scalar>
Scalar h_star_bound(Scalar beta1, Scalar beta2, Scalar mu_E, Scalar omega_star) {
  using std::sqrt;
  if (beta1 < Scalar(0) || beta2 < Scalar(0) || mu_E < Scalar(0) || omega_star < Scalar(0))
    throw DomainError("h_star_bound needs nonnegative inputs");
  return sqrt(Scalar(2) * beta1 * beta1 * mu_E + Scalar(2) * beta2 * beta2 * omega_star * omega_star);
}

/// Named constants of the approximation theorem for one system and grid.
template <typename Scalar>
struct BoundReport {
  ContractionReport<Scalar> contraction;
  Scalar lambda{};
  Scalar rho{};
  Scalar omega_star{}; // (int int ||K2(xi,s,0)||^2)^(1/2)
  Scalar M_eps{};      // max ||K2(xi,s,0)||
  Scalar h_norm{};     // ||h||_2 of the a-priori majorant
  Scalar psi{};        // psi_norm_bound
  Scalar beta_star{};  // trajectory norm bound
  Scalar denominator{}; // (1-kappa0)^2 - 4 lambda^2 [kappa1^2 + rho^2 kappa2^2 mu(E)]
  Scalar c_star{};
  Scalar g1{};
  Scalar g2{};
};

/// K2 norms use the Frobenius norm; M is the largest node-pair value, which
/// assumes K2(.,.,0) is continuous.
template <typename Scalar>
BoundReport<Scalar> compute_constants(const SystemSpec<Scalar>& sys, const GridDiscretization<Scalar>& grid) {
  using std::sqrt;
  sys.validate();
  BoundReport<Scalar> r;
  r.contraction = check_condition_2d(sys, grid);
  if (!r.contraction.passes)
    throw DomainError("contraction condition fails for system '" + sys.name + "'");
  r.lambda = sys.lambda;
  r.rho = sys.rho;
  const auto& c = r.contraction;
  const Index N = grid.size();
  const VectorX<Scalar> zero = VectorX<Scalar>::Zero(sys.state_dim);

  Scalar omega_sq(0), M(0), h_sq(0);
  for (Index i = 0; i < N; ++i) {
    const auto& xi = grid.nodes[static_cast<std::size_t>(i)];
    Scalar k1_int(0), k2_sq_int(0);
    for (Index j = 0; j < N; ++j) {
      const auto& s = grid.nodes[static_cast<std::size_t>(j)];
      const Scalar k2n = sys.k2(xi, s, zero).norm();
      k2_sq_int += grid.weights[j] * k2n * k2n;
      M = std::max(M, k2n);
      if (sys.k1)
        k1_int += grid.weights[j] * sys.k1(xi, s, zero).norm();
    }
    omega_sq += grid.weights[i] * k2_sq_int;
    const Scalar h = (sys.f(xi, zero).norm() + sys.lambda * k1_int + sys.lambda * sys.rho * sqrt(k2_sq_int)) /
                     (Scalar(1) - c.kappa0);
    h_sq += grid.weights[i] * h * h;
  }
  r.omega_star = sqrt(omega_sq);
  r.M_eps = M;
  r.h_norm = sqrt(h_sq);
  r.psi = psi_norm_bound(c.kappa0, c.kappa1, c.kappa2, sys.lambda, sys.rho, c.mu_E);
  r.beta_star = gronwall_bound(r.h_norm, r.psi);

  const Scalar lam2 = sys.lambda * sys.lambda;
  const Scalar rho2 = sys.rho * sys.rho;
  const Scalar one_minus = Scalar(1) - c.kappa0;
  r.denominator = one_minus * one_minus - Scalar(4) * lam2 * (c.kappa1 * c.kappa1 + rho2 * c.kappa2 * c.kappa2 * c.mu_E);
  if (!(r.denominator > Scalar(0)))
    throw InconsistencyError("nonpositive denominator in the approximation constants");

  const Scalar k2p1 = c.kappa2 + Scalar(1);
  r.c_star = sqrt(Scalar(16) * lam2 * rho2 * (k2p1 * k2p1 * c.mu_E + Scalar(1)) / r.denominator);
  const Scalar kb = c.kappa2 * c.kappa2 * r.beta_star * r.beta_star;
  r.g1 = sqrt(Scalar(4) * lam2 * (kb * c.mu_E + omega_sq) / r.denominator);
  r.g2 = sqrt(Scalar(4) * lam2 * (kb + omega_sq) * c.mu_E / r.denominator);
  return r;
}

/// Discretisation parameters guaranteeing h2 <= (c* + 1) eps.
template <typename Scalar>
struct ApproxSchedule {
  Scalar epsilon{};
  Scalar tau_star{};
  Scalar alpha_star{};
  Scalar R_star{};
  Scalar Delta_star{};
  Scalar delta_star{};
  Scalar sigma_star{};
  Scalar bound{}; // (c* + 1) eps
};

/// tau* = min(eps^2 / M^2, tau_cap); when M = 0 any tau works and mu(E) is used.
/// With g2 = 0 the partition, level and net parameters are unconstrained (+inf).
template <typename Scalar>
ApproxSchedule<Scalar> schedule(const BoundReport<Scalar>& consts, Scalar epsilon, Scalar R_star,
                                std::optional<Scalar> tau_cap = std::nullopt) {
  using std::sqrt;
  if (!(epsilon > Scalar(0)))
    throw ValidationError("epsilon must be positive");
  if (!(R_star > Scalar(0)))
    throw ValidationError("R_star must be positive");
  if (tau_cap && !(*tau_cap > Scalar(0)))
    throw ValidationError("tau_cap must be positive");
  ApproxSchedule<Scalar> s;
  s.epsilon = epsilon;
  s.R_star = R_star;
  s.tau_star = consts.M_eps > Scalar(0) ? epsilon * epsilon / (consts.M_eps * consts.M_eps) : consts.contraction.mu_E;
  if (tau_cap)
    s.tau_star = std::min(s.tau_star, *tau_cap);
  s.alpha_star = consts.rho / sqrt(s.tau_star);
  const Scalar inf = std::numeric_limits<Scalar>::infinity();
  const Scalar four_g2 = Scalar(4) * consts.g2;
  s.delta_star = four_g2 > Scalar(0) ? epsilon / four_g2 : inf;
  s.Delta_star = four_g2 > Scalar(0) ? epsilon / (four_g2 * R_star) : inf;
  s.sigma_star = four_g2 > Scalar(0) ? epsilon / (four_g2 * s.alpha_star) : inf;
  s.bound = (consts.c_star + Scalar(1)) * epsilon;
  return s;
}

template <typename Scalar>
ApproxSchedule<Scalar> schedule(const SystemSpec<Scalar>& sys, const GridDiscretization<Scalar>& grid, Scalar epsilon,
                                Scalar R_star, std::optional<Scalar> tau_cap = std::nullopt) {
  return schedule(compute_constants(sys, grid), epsilon, R_star, tau_cap);
}

} // namespace urysohn

#endif // URYSOHN_BOUNDS_HPP
