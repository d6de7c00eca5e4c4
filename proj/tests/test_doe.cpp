#include "doctest.h"

#include <algorithm>
#include <vector>

#include "dicm/doe.hpp"

using namespace dicm;

namespace {

bool latin_property(const Mat& pts) {
  const Index n = pts.rows();
  for (Index j = 0; j < pts.cols(); ++j) {
    std::vector<bool> hit(static_cast<std::size_t>(n), false);
    for (Index i = 0; i < n; ++i) {
      const auto stratum = static_cast<Index>(pts(i, j) * static_cast<double>(n));
      const Index idx = std::min(stratum, n - 1);
      if (hit[static_cast<std::size_t>(idx)]) return false;
      hit[static_cast<std::size_t>(idx)] = true;
    }
  }
  return true;
}

}  // namespace

TEST_CASE("maximin_lhd basic shapes") {
  const Design single = maximin_lhd(1, 3, 100, 1);
  CHECK(single.points.rows() == 1);
  CHECK(single.points.minCoeff() >= 0.0);
  CHECK(single.points.maxCoeff() <= 1.0);

  const Design two = maximin_lhd(2, 1, 0, 2);
  const double a = std::min(two.points(0, 0), two.points(1, 0));
  const double b = std::max(two.points(0, 0), two.points(1, 0));
  CHECK(a >= 0.0);
  CHECK(a < 0.5);
  CHECK(b >= 0.5);
  CHECK(b <= 1.0);
}

TEST_CASE("maximin_lhd keeps the Latin property and never worsens the start") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const Design start = maximin_lhd(10, 2, 0, seed);
    const Design opt = maximin_lhd(10, 2, 2000, seed);
    CHECK(latin_property(opt.points));
    CHECK(min_pairwise_distance(opt.points) >=
          min_pairwise_distance(start.points) - 1e-15);
  }
}

TEST_CASE("maximin_lhd is deterministic") {
  const Design a = maximin_lhd(12, 3, 500, 42);
  const Design b = maximin_lhd(12, 3, 500, 42);
  CHECK((a.points - b.points).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("grid_design") {
  const Design g20 = grid_design(20, 2);
  CHECK(g20.points.rows() == 400);

  const Design g2 = grid_design(2, 1);
  CHECK(g2.points(0, 0) == 0.0);
  CHECK(g2.points(1, 0) == 1.0);

  const Design g3 = grid_design(3, 2);
  CHECK(g3.points.rows() == 9);
  bool has_center = false;
  for (Index i = 0; i < 9; ++i) {
    if (g3.points(i, 0) == 0.5 && g3.points(i, 1) == 0.5) has_center = true;
  }
  CHECK(has_center);

  CHECK_THROWS_AS(grid_design(1, 2), DomainError);
  CHECK_THROWS_AS(grid_design(101, 3), SizeError);
}

TEST_CASE("rescale_design") {
  Mat unit(3, 1);
  unit << 0.0, 1.0, 0.5;
  Vec lo(1), hi(1);
  lo << -5.0;
  hi << 10.0;
  const Mat out = rescale_design(unit, lo, hi);
  CHECK(out(0, 0) == -5.0);
  CHECK(out(1, 0) == 10.0);
  CHECK(out(2, 0) == doctest::Approx(2.5));

  Vec bad_hi(1);
  bad_hi << -5.0;
  CHECK_THROWS_AS(rescale_design(unit, lo, bad_hi), DomainError);
}

TEST_CASE("grid endpoints land exactly on domain bounds") {
  const Design g = grid_design(5, 2);
  Vec lo(2), hi(2);
  lo << -5.0, 0.0;
  hi << 10.0, 15.0;
  const Mat nat = rescale_design(g.points, lo, hi);
  CHECK(nat.col(0).minCoeff() == -5.0);
  CHECK(nat.col(0).maxCoeff() == 10.0);
  CHECK(nat.col(1).minCoeff() == 0.0);
  CHECK(nat.col(1).maxCoeff() == 15.0);
}
