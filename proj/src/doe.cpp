#include "dicm/doe.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <tuple>
#include <vector>

#include "dicm/rng.hpp"

namespace dicm {

double min_pairwise_distance(const Mat& points) {
  const Index n = points.rows();
  double best = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      best = std::min(best, (points.row(i) - points.row(j)).norm());
    }
  }
  return best;
}

namespace {

// Tracks all pairwise squared distances in an ordered set so the global
// minimum and "minimum excluding two rows" are cheap to query during the
// swap hill climb.
class PairTracker {
 public:
  explicit PairTracker(const Mat& pts) : d2_(pts.rows(), pts.rows()) {
    const Index n = pts.rows();
    for (Index i = 0; i < n; ++i) {
      for (Index j = i + 1; j < n; ++j) {
        const double d = (pts.row(i) - pts.row(j)).squaredNorm();
        d2_(i, j) = d;
        d2_(j, i) = d;
        pairs_.emplace(d, i, j);
      }
    }
  }

  double global_min() const { return std::get<0>(*pairs_.begin()); }

  double min_excluding(Index a, Index b) const {
    for (const auto& [d, i, j] : pairs_) {
      if (i != a && i != b && j != a && j != b) return d;
    }
    return std::numeric_limits<double>::infinity();
  }

  void replace(Index a, Index k, double new_d2) {
    const Index i = std::min(a, k);
    const Index j = std::max(a, k);
    pairs_.erase({d2_(i, j), i, j});
    pairs_.emplace(new_d2, i, j);
    d2_(i, j) = new_d2;
    d2_(j, i) = new_d2;
  }

  double current(Index i, Index j) const { return d2_(i, j); }

 private:
  Mat d2_;
  std::set<std::tuple<double, Index, Index>> pairs_;
};

}  // namespace

Design maximin_lhd(Index n, Index d, Index optimize_iters, std::uint64_t seed) {
  if (n < 1 || d < 1) throw DomainError("maximin_lhd: need n >= 1 and d >= 1");
  Rng rng(seed);

  // Stratum midpoints with an independent permutation per dimension.
  Mat pts(n, d);
  std::vector<Index> perm(static_cast<std::size_t>(n));
  for (Index j = 0; j < d; ++j) {
    for (Index i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = i;
    for (Index i = n - 1; i > 0; --i) {
      const auto k = static_cast<Index>(
          rng.uniform_below(static_cast<std::uint64_t>(i + 1)));
      std::swap(perm[static_cast<std::size_t>(i)],
                perm[static_cast<std::size_t>(k)]);
    }
    for (Index i = 0; i < n; ++i) {
      pts(i, j) = (static_cast<double>(perm[static_cast<std::size_t>(i)]) + 0.5) /
                  static_cast<double>(n);
    }
  }

  if (n >= 2 && optimize_iters > 0) {
    PairTracker tracker(pts);
    std::vector<double> new_a(static_cast<std::size_t>(n));
    std::vector<double> new_b(static_cast<std::size_t>(n));
    for (Index it = 0; it < optimize_iters; ++it) {
      const auto j = static_cast<Index>(
          rng.uniform_below(static_cast<std::uint64_t>(d)));
      const auto a = static_cast<Index>(
          rng.uniform_below(static_cast<std::uint64_t>(n)));
      auto b = static_cast<Index>(
          rng.uniform_below(static_cast<std::uint64_t>(n - 1)));
      if (b >= a) ++b;
      if (pts(a, j) == pts(b, j)) continue;

      // Swapping coordinate j of rows a and b only changes distances that
      // involve a or b; the a-b distance itself is unchanged.
      const double da = pts(a, j);
      const double db = pts(b, j);
      double affected_min = tracker.current(std::min(a, b), std::max(a, b));
      for (Index k = 0; k < n; ++k) {
        if (k == a || k == b) continue;
        const double xk = pts(k, j);
        new_a[static_cast<std::size_t>(k)] =
            tracker.current(a, k) - (da - xk) * (da - xk) + (db - xk) * (db - xk);
        new_b[static_cast<std::size_t>(k)] =
            tracker.current(b, k) - (db - xk) * (db - xk) + (da - xk) * (da - xk);
        affected_min = std::min(affected_min, new_a[static_cast<std::size_t>(k)]);
        affected_min = std::min(affected_min, new_b[static_cast<std::size_t>(k)]);
      }
      const double candidate_min =
          std::min(affected_min, tracker.min_excluding(a, b));
      if (candidate_min >= tracker.global_min()) {
        for (Index k = 0; k < n; ++k) {
          if (k == a || k == b) continue;
          tracker.replace(a, k, new_a[static_cast<std::size_t>(k)]);
          tracker.replace(b, k, new_b[static_cast<std::size_t>(k)]);
        }
        pts(a, j) = db;
        pts(b, j) = da;
      }
    }
  }

  return Design{std::move(pts), Design::Kind::maximin_lhd, seed};
}

Design grid_design(Index points_per_dim, Index d) {
  if (points_per_dim < 2) {
    throw DomainError("grid_design: need at least 2 points per dimension");
  }
  if (d < 1) throw DomainError("grid_design: need d >= 1");
  double total_d = std::pow(static_cast<double>(points_per_dim),
                            static_cast<double>(d));
  if (total_d > 1e6) {
    throw SizeError("grid_design: grid exceeds 10^6 points");
  }
  const auto total = static_cast<Index>(total_d + 0.5);
  Mat pts(total, d);
  for (Index i = 0; i < total; ++i) {
    Index rem = i;
    for (Index j = 0; j < d; ++j) {
      const Index c = rem % points_per_dim;
      rem /= points_per_dim;
      pts(i, j) = static_cast<double>(c) /
                  static_cast<double>(points_per_dim - 1);
    }
  }
  return Design{std::move(pts), Design::Kind::grid, 0};
}

Design uniform_random(Index n, Index d, std::uint64_t seed) {
  if (n < 1 || d < 1) {
    throw DomainError("uniform_random: need n >= 1 and d >= 1");
  }
  Rng rng(seed);
  Mat pts(n, d);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < d; ++j) pts(i, j) = rng.uniform();
  }
  return Design{std::move(pts), Design::Kind::uniform_random, seed};
}

Mat rescale_design(const Mat& unit_points, const Vec& lower, const Vec& upper) {
  if (lower.size() != unit_points.cols() || upper.size() != unit_points.cols()) {
    throw ShapeError("rescale_design: bound dimension mismatch");
  }
  for (Index j = 0; j < lower.size(); ++j) {
    if (!(lower(j) < upper(j))) {
      throw DomainError("rescale_design: need lower < upper componentwise");
    }
  }
  Mat out(unit_points.rows(), unit_points.cols());
  for (Index i = 0; i < unit_points.rows(); ++i) {
    for (Index j = 0; j < unit_points.cols(); ++j) {
      out(i, j) = lower(j) + unit_points(i, j) * (upper(j) - lower(j));
    }
  }
  return out;
}

}  // namespace dicm
