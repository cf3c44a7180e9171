#ifndef URYSOHN_SYSTEM_HPP
#define URYSOHN_SYSTEM_HPP

#include <functional>
#include <random>
#include <string>

#include "urysohn/types.hpp"

namespace urysohn {

/// Control system
///   x(xi) = f(xi, x(xi)) + lambda * int_E [K1(xi, s, x(s)) + K2(xi, s, x(s)) u(s)] ds
/// with admissible controls ||u||_2 <= rho.
///
/// Lipschitz data: |f(xi,.)|_Lip <= gamma0_bound, |K1(xi,s,.)|_Lip <= gamma1(xi,s),
/// |K2(xi,s,.)|_Lip <= gamma2_bound (Frobenius norm). Evaluators must be pure.
template <typename Scalar>
struct SystemSpec {
  using Vector = VectorX<Scalar>;
  using Matrix = MatrixX<Scalar>;
  using StateMap = std::function<Vector(const Vector& xi, const Vector& x)>;
  using Kernel1 = std::function<Vector(const Vector& xi, const Vector& s, const Vector& x)>;
  using Kernel2 = std::function<Matrix(const Vector& xi, const Vector& s, const Vector& x)>;
  using ScalarKernel = std::function<Scalar(const Vector& xi, const Vector& s)>;

  std::string name;
  Index state_dim = 1;
  Index control_dim = 1;
  Box<Scalar> domain;
  Scalar lambda{};
  Scalar rho{};

  StateMap f;
  Kernel1 k1;   // empty means K1 == 0
  Kernel2 k2;
  Scalar gamma0_bound{};
  ScalarKernel gamma1; // empty means gamma1 == 0
  Scalar gamma2_bound{};

  /// K2 does not depend on x; lets the solver cache K2 on the grid.
  bool k2_state_independent = false;

  Index domain_dim() const { return domain.dim(); }

  void validate() const {
    if (state_dim < 1 || control_dim < 1)
      throw ValidationError("state and control dimensions must be positive");
    if (domain.dim() < 1)
      throw ValidationError("domain box is not set");
    if (!(lambda > Scalar(0)))
      throw ValidationError("lambda must be positive");
    if (!(rho > Scalar(0)))
      throw ValidationError("rho must be positive");
    if (!f || !k2)
      throw ValidationError("f and K2 evaluators are required");
    if (gamma0_bound < Scalar(0) || gamma2_bound < Scalar(0))
      throw ValidationError("Lipschitz bounds must be nonnegative");
    if (!(gamma0_bound < Scalar(1)))
      throw ValidationError("gamma0 bound must be < 1");
  }

  Scalar gamma1_at(const Vector& xi, const Vector& s) const { return gamma1 ? gamma1(xi, s) : Scalar(0); }

  Vector k1_at(const Vector& xi, const Vector& s, const Vector& x) const {
    return k1 ? k1(xi, s, x) : Vector::Zero(state_dim);
  }
};

/// Grid-sampled solution of the system for one control.
template <typename Scalar>
struct Trajectory {
  GridFunction<Scalar> values; // state_dim x nodes
  Scalar residual_l2{};
  std::string control_id;
  Index iterations = 0;
  std::vector<Scalar> gaps;     // successive-iterate L2 gaps
  bool constraint_warning = false; // control norm exceeded rho
};

struct LipschitzSpotCheck {
  Index samples = 0;
  Index f_violations = 0;
  Index k1_violations = 0;
  Index k2_violations = 0;
  bool ok() const { return f_violations == 0 && k1_violations == 0 && k2_violations == 0; }
};

/// Counts violations of the declared Lipschitz bounds at random (xi, s, x1, x2).
template <typename Scalar>
LipschitzSpotCheck spot_check_lipschitz(const SystemSpec<Scalar>& sys, Index samples, std::uint64_t seed,
                                        Scalar state_scale = Scalar(10), Scalar rel_tol = Scalar(1e-10)) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<Scalar> unit(Scalar(0), Scalar(1));
  std::uniform_real_distribution<Scalar> state(-state_scale, state_scale);
  const Index k = sys.domain_dim();
  auto point = [&] {
    VectorX<Scalar> p(k);
    for (Index a = 0; a < k; ++a)
      p[a] = sys.domain.lower[a] + unit(rng) * (sys.domain.upper[a] - sys.domain.lower[a]);
    return p;
  };
  auto state_vec = [&] {
    VectorX<Scalar> x(sys.state_dim);
    for (Index i = 0; i < sys.state_dim; ++i)
      x[i] = state(rng);
    return x;
  };
  LipschitzSpotCheck out;
  out.samples = samples;
  for (Index i = 0; i < samples; ++i) {
    const auto xi = point();
    const auto s = point();
    const auto x1 = state_vec();
    const auto x2 = state_vec();
    const Scalar dx = (x1 - x2).norm();
    const Scalar slack = rel_tol * (Scalar(1) + dx);
    if ((sys.f(xi, x1) - sys.f(xi, x2)).norm() > sys.gamma0_bound * dx + slack)
      ++out.f_violations;
    if ((sys.k1_at(xi, s, x1) - sys.k1_at(xi, s, x2)).norm() > sys.gamma1_at(xi, s) * dx + slack)
      ++out.k1_violations;
    if ((sys.k2(xi, s, x1) - sys.k2(xi, s, x2)).norm() > sys.gamma2_bound * dx + slack)
      ++out.k2_violations;
  }
  return out;
}

} // namespace urysohn

#endif // URYSOHN_SYSTEM_HPP
