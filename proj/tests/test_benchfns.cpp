#include "doctest.h"

#include <cmath>

#include "dicm/benchfns.hpp"
#include "dicm/doe.hpp"
#include "dicm/rng.hpp"

using namespace dicm;

namespace {

Mat point1(double x) {
  Mat m(1, 1);
  m << x;
  return m;
}

Mat point2(double x1, double x2) {
  Mat m(1, 2);
  m << x1, x2;
  return m;
}

// Standalone re-implementation of the Currin base used to cross-check the
// four-term average.
double currin_base(double x1, double x2) {
  const double factor = (x2 == 0.0) ? 1.0 : 1.0 - std::exp(-0.5 / x2);
  return factor *
         (2300.0 * std::pow(x1, 3) + 1900.0 * x1 * x1 + 2092.0 * x1 + 60.0) /
         (100.0 * std::pow(x1, 3) + 500.0 * x1 * x1 + 4.0 * x1 + 20.0);
}

}  // namespace

TEST_CASE("table of function metadata") {
  struct Row {
    const char* name;
    Index d, q, n_train, n_test;
  };
  const Row rows[] = {
      {"forrester", 1, 2, 9, 100},   {"convolved", 1, 3, 10, 100},
      {"dampedwave", 1, 3, 15, 100}, {"perdikaris", 1, 2, 12, 100},
      {"branin", 2, 3, 30, 500},     {"mop2", 2, 2, 30, 500},
      {"currin", 2, 2, 30, 500},     {"park", 4, 2, 60, 1000},
  };
  for (const Row& r : rows) {
    const BenchSpec& s = bench_spec(r.name);
    CHECK(s.d == r.d);
    CHECK(s.q == r.q);
    CHECK(s.default_n_train == r.n_train);
    CHECK(s.default_n_test == r.n_test);
  }
  CHECK(bench_names().size() == 8);
  CHECK_THROWS_AS(bench_spec("nosuch"), LookupError);
}

TEST_CASE("spot values") {
  const Mat forrester0 = bench_evaluate("forrester", point1(0.0));
  CHECK(forrester0(0, 0) == doctest::Approx(3.027210).epsilon(1e-6));
  CHECK(forrester0(0, 1) == doctest::Approx(1.513605).epsilon(1e-6));

  const Mat perd0 = bench_evaluate("perdikaris", point1(0.0));
  CHECK(perd0(0, 0) == doctest::Approx(0.0));
  CHECK(perd0(0, 1) == doctest::Approx(0.0));

  const double c = 1.0 / std::sqrt(2.0);
  CHECK(bench_evaluate("mop2", point2(c, c))(0, 0) == doctest::Approx(0.0));

  CHECK(bench_evaluate("branin", point2(3.14159265358979, 2.275))(0, 2) ==
        doctest::Approx(0.397887).epsilon(1e-4));
}

TEST_CASE("output shapes and domain checks") {
  for (const auto& name : bench_names()) {
    const BenchSpec& s = bench_spec(name);
    const Mat unit = grid_design(2, s.d).points;
    const Mat nat = rescale_design(unit, s.lower, s.upper);
    const Mat y = bench_evaluate(name, nat);
    CHECK(y.rows() == nat.rows());
    CHECK(y.cols() == s.q);
    CHECK(y.allFinite());

    Mat outside = nat;
    outside(0, 0) = s.upper(0) + 0.5 * (s.upper(0) - s.lower(0));
    CHECK_THROWS_AS(bench_evaluate(name, outside), DomainError);
  }
  CHECK_THROWS_AS(bench_evaluate("nosuch", point1(0.0)), LookupError);
}

TEST_CASE("currin averaged output matches a standalone re-implementation") {
  Rng rng(4242);
  for (int rep = 0; rep < 100; ++rep) {
    const double x1 = rng.uniform();
    const double x2 = rng.uniform();
    const Mat y = bench_evaluate("currin", point2(x1, x2));
    CHECK(y(0, 0) == doctest::Approx(currin_base(x1, x2)).epsilon(1e-12));
    const double expected =
        0.25 * (currin_base(x1 + 0.05, x2 + 0.05) +
                currin_base(x1 + 0.05, std::max(0.0, x2 - 0.05)) +
                currin_base(x1 - 0.05, x2 + 0.05) +
                currin_base(x1 - 0.05, std::max(0.0, x2 - 0.05)));
    CHECK(y(0, 1) == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("branin inner component stays positive over the domain") {
  const BenchSpec& s = bench_spec("branin");
  const Mat grid = rescale_design(grid_design(50, 2).points, s.lower, s.upper);
  const Mat y = bench_evaluate("branin", grid);
  CHECK(y.col(2).minCoeff() > 0.0);
}

TEST_CASE("currin and park boundary behavior") {
  CHECK(std::isfinite(bench_evaluate("currin", point2(0.3, 0.0))(0, 0)));
  Mat park0(1, 4);
  park0 << 0.0, 0.5, 0.5, 0.5;
  const Mat y = bench_evaluate("park", park0);
  CHECK(y.allFinite());
}
