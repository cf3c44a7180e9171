#ifndef URYSOHN_SPHERE_NET_HPP
#define URYSOHN_SPHERE_NET_HPP

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "urysohn/types.hpp"

namespace urysohn {

/// Finite set of unit vectors in R^m such that every unit vector lies within
/// sigma of some net point. The first point is always e_1; it doubles as the
/// canonical direction of zero-magnitude controls.
template <typename Scalar>
struct SphereNet {
  std::vector<VectorX<Scalar>> points;
  Scalar sigma{};
  Scalar covering_bound{}; // analytic covering radius of the construction, <= sigma

  Index size() const { return static_cast<Index>(points.size()); }
  Index dim() const { return points.empty() ? 0 : points.front().size(); }

  /// Nearest net point, ties to the lowest index.
  Index nearest(const VectorX<Scalar>& x) const {
    Index best = 0;
    Scalar best_d = (points[0] - x).squaredNorm();
    for (Index l = 1; l < size(); ++l) {
      const Scalar d = (points[static_cast<std::size_t>(l)] - x).squaredNorm();
      if (d < best_d) {
        best_d = d;
        best = l;
      }
    }
    return best;
  }
};

/// Uniform random unit vector (normalised Gaussian).
template <typename Scalar, typename Rng>
VectorX<Scalar> random_unit_vector(Index m, Rng& rng) {
  std::normal_distribution<Scalar> normal(Scalar(0), Scalar(1));
  VectorX<Scalar> x(m);
  do {
    for (Index i = 0; i < m; ++i)
      x[i] = normal(rng);
  } while (x.norm() == Scalar(0));
  return x / x.norm();
}

/// Largest distance from `samples` random unit vectors to the net.
template <typename Scalar>
Scalar sampled_covering_radius(const SphereNet<Scalar>& net, Index samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Scalar worst(0);
  for (Index i = 0; i < samples; ++i) {
    const auto x = random_unit_vector<Scalar>(net.dim(), rng);
    worst = std::max(worst, (net.points[static_cast<std::size_t>(net.nearest(x))] - x).norm());
  }
  return worst;
}

namespace detail {

// Midpoints of t equal subintervals of [-1,1] on every non-fixed coordinate of
// each of the 2m faces of the cube, projected radially onto the sphere. Radial
// projection from outside the ball is 1-Lipschitz, so the covering radius is at
// most sqrt(m-1)/t.
template <typename Scalar>
std::vector<VectorX<Scalar>> cube_face_points(Index m, Index t) {
  std::vector<VectorX<Scalar>> out;
  Index per_face = 1;
  for (Index i = 0; i + 1 < m; ++i)
    per_face *= t;
  for (Index axis = 0; axis < m; ++axis)
    for (int sign : {1, -1})
      for (Index f = 0; f < per_face; ++f) {
        VectorX<Scalar> y(m);
        Index rest = f;
        for (Index c = 0; c < m; ++c) {
          if (c == axis) {
            y[c] = Scalar(sign);
            continue;
          }
          const Index j = rest % t;
          rest /= t;
          y[c] = Scalar(-1) + (Scalar(2) * Scalar(j) + Scalar(1)) / Scalar(t);
        }
        out.push_back(y / y.norm());
      }
  return out;
}

template <typename Scalar>
void prepend_e1_unique(std::vector<VectorX<Scalar>>& pts, Index m) {
  VectorX<Scalar> e1 = VectorX<Scalar>::Zero(m);
  e1[0] = Scalar(1);
  std::vector<VectorX<Scalar>> out{e1};
  const Scalar tol = Scalar(1e-12);
  for (auto& p : pts) {
    const bool dup = std::any_of(out.begin(), out.end(), [&](const auto& q) { return (p - q).norm() <= tol; });
    if (!dup)
      out.push_back(std::move(p));
  }
  pts = std::move(out);
}

} // namespace detail

/// sigma-net on the unit sphere of R^m.
/// m = 1: {+1, -1}. m = 2: equiangular with step 2 asin(sigma/2).
/// m >= 3: radially projected cube-face grid, refined until 10^4 random
/// samples confirm coverage.
template <typename Scalar>
SphereNet<Scalar> sphere_net(Index m, Scalar sigma, Index max_refinements = 8) {
  using std::asin;
  using std::ceil;
  using std::sqrt;
  if (m < 1)
    throw ValidationError("sphere dimension m must be >= 1");
  if (!(sigma > Scalar(0)))
    throw ValidationError("sigma must be positive");

  SphereNet<Scalar> net;
  net.sigma = sigma;
  const Scalar s = std::min(sigma, Scalar(2));

  if (m == 1) {
    net.points = {VectorX<Scalar>::Constant(1, Scalar(1)), VectorX<Scalar>::Constant(1, Scalar(-1))};
    net.covering_bound = Scalar(0);
    return net;
  }

  if (m == 2) {
    const Scalar step = Scalar(2) * asin(s / Scalar(2));
    const Index count = std::max<Index>(2, static_cast<Index>(ceil(Scalar(2) * std::numbers::pi_v<Scalar> / step)));
    for (Index l = 0; l < count; ++l) {
      const Scalar theta = Scalar(2) * std::numbers::pi_v<Scalar> * Scalar(l) / Scalar(count);
      VectorX<Scalar> p(2);
      p << std::cos(theta), std::sin(theta);
      net.points.push_back(p);
    }
    using std::sin;
    net.covering_bound = Scalar(2) * sin(std::numbers::pi_v<Scalar> / Scalar(2 * count));
    return net;
  }

  Index t = std::max<Index>(1, static_cast<Index>(ceil(sqrt(Scalar(m - 1)) / s)));
  for (Index attempt = 0; attempt <= max_refinements; ++attempt, ++t) {
    net.points = detail::cube_face_points<Scalar>(m, t);
    detail::prepend_e1_unique(net.points, m);
    net.covering_bound = sqrt(Scalar(m - 1)) / Scalar(t);
    if (net.covering_bound <= sigma && sampled_covering_radius(net, 10000, 0x5eedULL + std::uint64_t(attempt)) <= sigma)
      return net;
  }
  throw ConstructionError("could not certify a sigma-net on S^" + std::to_string(m - 1));
}

} // namespace urysohn

#endif // URYSOHN_SPHERE_NET_HPP
