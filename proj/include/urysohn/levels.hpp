#ifndef URYSOHN_LEVELS_HPP
#define URYSOHN_LEVELS_HPP

#include <algorithm>
#include <vector>

#include "urysohn/types.hpp"

namespace urysohn {

/// Uniform magnitude levels 0 = r_0 < r_1 < ... < r_q = alpha.
template <typename Scalar>
struct LevelLadder {
  std::vector<Scalar> levels;
  Scalar step{};

  Index q() const { return static_cast<Index>(levels.size()) - 1; }
  Scalar top() const { return levels.back(); }

  /// Index of the largest level <= r, for 0 <= r <= top.
  Index floor_index(Scalar r) const {
    const auto it = std::upper_bound(levels.begin(), levels.end(), r);
    return static_cast<Index>(it - levels.begin()) - 1;
  }
};

template <typename Scalar>
LevelLadder<Scalar> uniform_levels(Scalar alpha, Index q) {
  if (q < 1)
    throw ValidationError("level count q must be >= 1");
  if (!(alpha > Scalar(0)))
    throw ValidationError("ladder top alpha must be positive");
  LevelLadder<Scalar> ladder;
  ladder.step = alpha / Scalar(q);
  ladder.levels.resize(static_cast<std::size_t>(q) + 1);
  for (Index j = 0; j < q; ++j)
    ladder.levels[static_cast<std::size_t>(j)] = Scalar(j) * alpha / Scalar(q);
  ladder.levels.back() = alpha;
  return ladder;
}

} // namespace urysohn

#endif // URYSOHN_LEVELS_HPP
