#ifndef URYSOHN_ORACLE_HPP
#define URYSOHN_ORACLE_HPP

#include <cmath>
#include <functional>
#include <string>
#include <type_traits>

#include "urysohn/grid.hpp"
#include "urysohn/system.hpp"

namespace urysohn {

/// Linear sub-family with a closed-form solution:
///   f(xi, x) = a x,  K1(xi, s, x) = b x,  K2(xi, s, x) = kernel(xi, s).
template <typename Scalar>
struct LinearSpec {
  Scalar a{};
  Scalar b{};
  std::function<MatrixX<Scalar>(const VectorX<Scalar>& xi, const VectorX<Scalar>& s)> kernel;
  Scalar lambda{};
  Box<Scalar> domain;
  Index state_dim = 1;
  Index control_dim = 1;

  void validate() const {
    using std::abs;
    if (!(abs(a) < Scalar(1)))
      throw ValidationError("linear oracle needs |a| < 1");
    if (!kernel)
      throw ValidationError("linear oracle needs a kernel");
    if (b != Scalar(0) && (Scalar(1) - a) - lambda * b * domain.measure() == Scalar(0))
      throw ValidationError("linear oracle is singular: (1 - a) - lambda b mu(E) = 0");
  }
};

/// The same family expressed as a general system.
template <typename Scalar>
SystemSpec<Scalar> to_system(const LinearSpec<Scalar>& spec, Scalar rho, std::string name = "linear") {
  using std::abs;
  using Vector = VectorX<Scalar>;
  spec.validate();
  SystemSpec<Scalar> sys;
  sys.name = std::move(name);
  sys.state_dim = spec.state_dim;
  sys.control_dim = spec.control_dim;
  sys.domain = spec.domain;
  sys.lambda = spec.lambda;
  sys.rho = rho;
  const Scalar a = spec.a, b = spec.b;
  sys.f = [a](const Vector&, const Vector& x) -> Vector { return a * x; };
  if (b != Scalar(0)) {
    sys.k1 = [b](const Vector&, const Vector&, const Vector& x) -> Vector { return b * x; };
    sys.gamma1 = [b](const Vector&, const Vector&) { return abs(b); };
  }
  auto kernel = spec.kernel;
  sys.k2 = [kernel](const Vector& xi, const Vector& s, const Vector&) { return kernel(xi, s); };
  sys.gamma0_bound = abs(a);
  sys.gamma2_bound = Scalar(0);
  sys.k2_state_independent = true;
  return sys;
}

/// Closed-form trajectory on the grid. With C(xi) = int kernel(xi,s) u(s) ds:
///   b = 0:  x = lambda C / (1 - a)
///   b != 0: X = lambda int C / ((1 - a) - lambda b mu(E)),  x = (lambda b X + lambda C) / (1 - a)
template <typename Scalar>
Trajectory<Scalar> linear_trajectory(const LinearSpec<Scalar>& spec, const GridFunction<std::type_identity_t<Scalar>>& u,
                                     const GridDiscretization<Scalar>& grid) {
  spec.validate();
  if (u.rows() != spec.control_dim || u.cols() != grid.size())
    throw ValidationError("control does not match the oracle dimensions");
  const Index N = grid.size();
  GridFunction<Scalar> C = GridFunction<Scalar>::Zero(spec.state_dim, N);
  for (Index i = 0; i < N; ++i)
    for (Index j = 0; j < N; ++j)
      C.col(i) += grid.weights[j] * (spec.kernel(grid.nodes[static_cast<std::size_t>(i)],
                                                 grid.nodes[static_cast<std::size_t>(j)]) * u.col(j));
  Trajectory<Scalar> t;
  t.control_id = "oracle";
  if (spec.b == Scalar(0)) {
    t.values = (spec.lambda / (Scalar(1) - spec.a)) * C;
    return t;
  }
  const VectorX<Scalar> X = spec.lambda * (C * grid.weights) /
                            ((Scalar(1) - spec.a) - spec.lambda * spec.b * grid.measure());
  t.values = (spec.lambda * C).colwise() + spec.lambda * spec.b * X;
  t.values /= (Scalar(1) - spec.a);
  return t;
}

/// LIN1 as a linear spec.
template <typename Scalar = double>
LinearSpec<Scalar> lin1_spec() {
  LinearSpec<Scalar> s;
  s.a = Scalar(0.1);
  s.b = Scalar(0);
  s.kernel = [](const VectorX<Scalar>&, const VectorX<Scalar>&) { return MatrixX<Scalar>::Constant(1, 1, Scalar(1)); };
  s.lambda = Scalar(0.1);
  s.domain = Box<Scalar>::unit(1);
  return s;
}

} // namespace urysohn

#endif // URYSOHN_ORACLE_HPP
