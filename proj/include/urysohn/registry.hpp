#ifndef URYSOHN_REGISTRY_HPP
#define URYSOHN_REGISTRY_HPP

#include <cmath>
#include <string>
#include <vector>

#include "urysohn/system.hpp"

namespace urysohn {

inline std::vector<std::string> builtin_system_names() { return {"LIN1", "ZERO", "ROT2", "HEAT2"}; }

/// Built-in test systems.
///
///   LIN1  E=[0,1], n=m=1: f = 0.1 x, K1 = 0, K2 = 1, lambda = 0.1, rho = 1.
///   ZERO  E=[0,1], n=m=1: f = K1 = K2 = 0, lambda = 0.1, rho = 1.
///   ROT2  E=[0,1], n=m=2: f = 0.1 sin(x), K1 = 0.2 xi s tanh(x),
///         K2 = 0.5 Rot(xi - s) + 0.05 diag(sin x), lambda = 0.2, rho = 1.
///   HEAT2 E=[0,1]^2, n=m=1: f = 0.1 tanh(x) + 0.05 xi_1,
///         K1 = 0.1 exp(-|xi-s|^2) cos(x), K2 = exp(-|xi-s|^2), lambda = 0.3, rho = 1.
template <typename Scalar = double>
SystemSpec<Scalar> builtin_system(const std::string& name) {
  using Vector = VectorX<Scalar>;
  using Matrix = MatrixX<Scalar>;
  SystemSpec<Scalar> sys;
  sys.name = name;

  if (name == "LIN1" || name == "ZERO") {
    const bool zero = name == "ZERO";
    const Scalar a = zero ? Scalar(0) : Scalar(0.1);
    const Scalar k = zero ? Scalar(0) : Scalar(1);
    sys.state_dim = 1;
    sys.control_dim = 1;
    sys.domain = Box<Scalar>::unit(1);
    sys.lambda = Scalar(0.1);
    sys.rho = Scalar(1);
    sys.f = [a](const Vector&, const Vector& x) -> Vector { return a * x; };
    sys.k2 = [k](const Vector&, const Vector&, const Vector&) -> Matrix { return Matrix::Constant(1, 1, k); };
    sys.gamma0_bound = a;
    sys.gamma2_bound = Scalar(0);
    sys.k2_state_independent = true;
    return sys;
  }

  if (name == "ROT2") {
    sys.state_dim = 2;
    sys.control_dim = 2;
    sys.domain = Box<Scalar>::unit(1);
    sys.lambda = Scalar(0.2);
    sys.rho = Scalar(1);
    sys.f = [](const Vector&, const Vector& x) -> Vector { return Scalar(0.1) * x.array().sin().matrix(); };
    sys.k1 = [](const Vector& xi, const Vector& s, const Vector& x) -> Vector {
      return Scalar(0.2) * xi[0] * s[0] * x.array().tanh().matrix();
    };
    sys.gamma1 = [](const Vector& xi, const Vector& s) { return Scalar(0.2) * xi[0] * s[0]; };
    sys.k2 = [](const Vector& xi, const Vector& s, const Vector& x) -> Matrix {
      using std::cos;
      using std::sin;
      const Scalar t = xi[0] - s[0];
      Matrix m(2, 2);
      m << cos(t), -sin(t), sin(t), cos(t);
      m *= Scalar(0.5);
      m(0, 0) += Scalar(0.05) * sin(x[0]);
      m(1, 1) += Scalar(0.05) * sin(x[1]);
      return m;
    };
    sys.gamma0_bound = Scalar(0.1);
    sys.gamma2_bound = Scalar(0.05);
    return sys;
  }

  if (name == "HEAT2") {
    sys.state_dim = 1;
    sys.control_dim = 1;
    sys.domain = Box<Scalar>::unit(2);
    sys.lambda = Scalar(0.3);
    sys.rho = Scalar(1);
    sys.f = [](const Vector& xi, const Vector& x) -> Vector {
      return (Scalar(0.1) * x.array().tanh() + Scalar(0.05) * xi[0]).matrix();
    };
    sys.k1 = [](const Vector& xi, const Vector& s, const Vector& x) -> Vector {
      using std::exp;
      return (Scalar(0.1) * exp(-(xi - s).squaredNorm()) * x.array().cos()).matrix();
    };
    sys.gamma1 = [](const Vector& xi, const Vector& s) {
      using std::exp;
      return Scalar(0.1) * exp(-(xi - s).squaredNorm());
    };
    sys.k2 = [](const Vector& xi, const Vector& s, const Vector&) -> Matrix {
      using std::exp;
      return Matrix::Constant(1, 1, exp(-(xi - s).squaredNorm()));
    };
    sys.gamma0_bound = Scalar(0.1);
    sys.gamma2_bound = Scalar(0);
    sys.k2_state_independent = true;
    return sys;
  }

  throw LookupError("unknown built-in system '" + name + "'");
}

} // namespace urysohn

#endif // URYSOHN_REGISTRY_HPP
