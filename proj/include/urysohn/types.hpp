#ifndef URYSOHN_TYPES_HPP
#define URYSOHN_TYPES_HPP

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <vector>

#include "urysohn/errors.hpp"

namespace urysohn {

using Index = Eigen::Index;

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using VectorXd = VectorX<double>;
using MatrixXd = MatrixX<double>;

/// Values of a vector-valued function at every grid node, one column per node.
template <typename Scalar>
using GridFunction = MatrixX<Scalar>;

/// Axis-aligned box [lower, upper] in R^k.
template <typename Scalar>
struct Box {
  VectorX<Scalar> lower;
  VectorX<Scalar> upper;

  Box() = default;
  Box(VectorX<Scalar> lo, VectorX<Scalar> hi) : lower(std::move(lo)), upper(std::move(hi)) {
    if (lower.size() != upper.size() || lower.size() == 0)
      throw ValidationError("box corners must have equal, nonzero dimension");
    for (Index a = 0; a < lower.size(); ++a)
      if (!(upper[a] > lower[a]))
        throw ValidationError("box has a degenerate side on axis " + std::to_string(a));
  }

  /// Unit cube [0,1]^k.
  static Box unit(Index k) {
    return Box(VectorX<Scalar>::Zero(k), VectorX<Scalar>::Ones(k));
  }

  Index dim() const { return lower.size(); }
  VectorX<Scalar> sides() const { return upper - lower; }
  Scalar measure() const { return sides().prod(); }
  Scalar diameter() const { return sides().norm(); }

  bool contains(const VectorX<Scalar>& p, Scalar slack = Scalar(0)) const {
    return ((p - lower).array() >= -slack).all() && ((upper - p).array() >= -slack).all();
  }
};

/// Volume of the unit ball in R^k.
template <typename Scalar>
Scalar unit_ball_volume(Index k) {
  using std::pow;
  using std::tgamma;
  const Scalar half_k = Scalar(k) / Scalar(2);
  return pow(std::numbers::pi_v<Scalar>, half_k) / tgamma(half_k + Scalar(1));
}

} // namespace urysohn

#endif // URYSOHN_TYPES_HPP
