#pragma once

#include <cstdint>

#include "dicm/linalg.hpp"

namespace dicm {

/// A point set in the unit hypercube.
struct Design {
  enum class Kind { maximin_lhd, grid, uniform_random };

  Mat points;  // n x d, all coordinates in [0, 1]
  Kind kind = Kind::maximin_lhd;
  std::uint64_t seed = 0;
};

/// Latin hypercube at stratum midpoints (k + 0.5)/n, maximin-optimized by
/// coordinate-swap hill climbing for optimize_iters proposals. Swaps happen
/// within a single dimension only, so the Latin property is preserved, and a
/// swap is accepted only when the minimum pairwise distance does not
/// decrease.
Design maximin_lhd(Index n, Index d, Index optimize_iters, std::uint64_t seed);

/// Full factorial grid with points_per_dim equally spaced coordinates per
/// dimension, endpoints 0 and 1 included. Dimension 0 varies fastest.
Design grid_design(Index points_per_dim, Index d);

/// Independent uniform draws in the unit hypercube.
Design uniform_random(Index n, Index d, std::uint64_t seed);

/// Affine map of unit-cube points onto [lower, upper] per coordinate.
Mat rescale_design(const Mat& unit_points, const Vec& lower, const Vec& upper);

/// Minimum pairwise Euclidean distance of a point set (infinity for n < 2).
double min_pairwise_distance(const Mat& points);

}  // namespace dicm
