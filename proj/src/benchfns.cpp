#include "dicm/benchfns.hpp"

#include <algorithm>
#include <cmath>

namespace dicm {

namespace {

constexpr double kPi = 3.14159265358979323846;

Vec make_vec(std::initializer_list<double> xs) {
  Vec v(static_cast<Index>(xs.size()));
  Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

const std::vector<BenchSpec>& all_specs() {
  static const std::vector<BenchSpec> specs = {
      {"forrester", 1, 2, make_vec({0.0}), make_vec({1.0}), 9, 100},
      {"convolved", 1, 3, make_vec({0.0}), make_vec({10.0}), 10, 100},
      {"dampedwave", 1, 3, make_vec({0.0}), make_vec({1.0}), 15, 100},
      {"perdikaris", 1, 2, make_vec({0.0}), make_vec({1.0}), 12, 100},
      {"branin", 2, 3, make_vec({-5.0, 0.0}), make_vec({10.0, 15.0}), 30, 500},
      {"mop2", 2, 2, make_vec({-2.0, -2.0}), make_vec({2.0, 2.0}), 30, 500},
      {"currin", 2, 2, make_vec({0.0, 0.0}), make_vec({1.0, 1.0}), 30, 500},
      {"park", 4, 2, make_vec({0.0, 0.0, 0.0, 0.0}),
       make_vec({1.0, 1.0, 1.0, 1.0}), 60, 1000},
  };
  return specs;
}

double forrester1(double x) {
  const double a = 6.0 * x - 2.0;
  return a * a * std::sin(12.0 * x - 4.0);
}

// Currin base function. The factor (1 - exp(-1/(2 x2))) is defined by its
// limit value 1 at x2 = 0 (removable singularity; the shifted arguments in
// the averaged variant make x2 = 0 reachable).
double currin1(double x1, double x2) {
  const double factor = (x2 == 0.0) ? 1.0 : 1.0 - std::exp(-1.0 / (2.0 * x2));
  const double num =
      2300.0 * x1 * x1 * x1 + 1900.0 * x1 * x1 + 2092.0 * x1 + 60.0;
  const double den = 100.0 * x1 * x1 * x1 + 500.0 * x1 * x1 + 4.0 * x1 + 20.0;
  return factor * num / den;
}

double branin3(double x1, double x2) {
  const double t = -1.275 * x1 * x1 / (kPi * kPi) + 5.0 * x1 / kPi + x2 - 6.0;
  return t * t + (10.0 - 5.0 / (4.0 * kPi)) * std::cos(x1) + 10.0;
}

double branin2(double x1, double x2) {
  return 10.0 * std::sqrt(branin3(x1, x2)) + 2.0 * (x1 - 0.5) -
         3.0 * (3.0 * x2 - 1.0) - 1.0;
}

double park1(double x1, double x2, double x3, double x4) {
  // The printed domain includes x1 = 0 where the 1/x1^2 term is singular;
  // x1 is clamped to 1e-6 inside that term, which matches the limit of the
  // exact expression.
  const double x1c = std::max(x1, 1e-6);
  const double inner = (1.0 + (x2 + x3 * x3) * x4) / (x1c * x1c);
  return 0.5 * x1c * (std::sqrt(inner) - 1.0) +
         (x1 + 3.0 * x4) * std::exp(1.0 + std::sin(x3));
}

}  // namespace

const std::vector<std::string>& bench_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& s : all_specs()) out.push_back(s.name);
    return out;
  }();
  return names;
}

const BenchSpec& bench_spec(const std::string& name) {
  for (const auto& s : all_specs()) {
    if (s.name == name) return s;
  }
  throw LookupError("unknown benchmark function: " + name);
}

Mat bench_evaluate(const std::string& name, const Mat& x) {
  const BenchSpec& spec = bench_spec(name);
  if (x.cols() != spec.d) {
    throw ShapeError("bench_evaluate: " + name + " expects d = " +
                     std::to_string(spec.d));
  }
  for (Index i = 0; i < x.rows(); ++i) {
    for (Index j = 0; j < spec.d; ++j) {
      const double tol = 1e-9 * (spec.upper(j) - spec.lower(j));
      if (x(i, j) < spec.lower(j) - tol || x(i, j) > spec.upper(j) + tol) {
        throw DomainError("bench_evaluate: input outside the domain of " +
                          name);
      }
    }
  }

  Mat y(x.rows(), spec.q);
  for (Index i = 0; i < x.rows(); ++i) {
    if (name == "forrester") {
      const double t = x(i, 0);
      y(i, 0) = forrester1(t);
      y(i, 1) = 0.5 * y(i, 0) + 10.0 * (t - 0.5) + 5.0;
    } else if (name == "convolved") {
      const double t = x(i, 0);
      y(i, 0) = 5.0 * std::sin(1.5 * t);
      y(i, 1) = 5.0 * std::sin(t) - 3.0;
      y(i, 2) = t * t / 10.0 - 5.0;
    } else if (name == "dampedwave") {
      const double t = x(i, 0);
      y(i, 0) = 5.0 * std::exp(-10.0 * t) *
                    (std::cos(10.0 * kPi * t - 1.0) +
                     std::sin(10.0 * kPi * t - 1.0)) -
                0.2;
      y(i, 1) = 6.0 * std::exp(-5.0 * t) *
                    (std::cos(10.0 * kPi * t - 1.0) +
                     std::sin(5.0 * kPi * t - 1.0)) -
                0.1;
      y(i, 2) = 4.0 * std::exp(-15.0 * t) *
                    (std::cos(5.0 * kPi * t - 1.0) +
                     std::sin(15.0 * kPi * t - 1.0)) -
                0.3;
    } else if (name == "perdikaris") {
      const double t = x(i, 0);
      const double f1 = std::sin(8.0 * kPi * t);
      y(i, 0) = f1;
      y(i, 1) = (t - std::sqrt(2.0)) * f1 * f1;
    } else if (name == "branin") {
      const double x1 = x(i, 0);
      const double x2 = x(i, 1);
      // f1 composes f2 at 1.2(x + 2); the inner call is evaluated as a
      // pure composition without re-checking the domain.
      y(i, 0) = branin2(1.2 * (x1 + 2.0), 1.2 * (x2 + 2.0)) - 3.0 * x2 + 1.0;
      y(i, 1) = branin2(x1, x2);
      y(i, 2) = branin3(x1, x2);
    } else if (name == "mop2") {
      const double c = 1.0 / std::sqrt(2.0);
      double s1 = 0.0;
      double s2 = 0.0;
      for (Index j = 0; j < 2; ++j) {
        s1 += (x(i, j) - c) * (x(i, j) - c);
        s2 += (x(i, j) + c) * (x(i, j) + c);
      }
      y(i, 0) = 1.0 - std::exp(-s1);
      y(i, 1) = 1.0 - std::exp(-s2);
    } else if (name == "currin") {
      const double x1 = x(i, 0);
      const double x2 = x(i, 1);
      y(i, 0) = currin1(x1, x2);
      y(i, 1) = 0.25 * (currin1(x1 + 0.05, x2 + 0.05) +
                        currin1(x1 + 0.05, std::max(0.0, x2 - 0.05)) +
                        currin1(x1 - 0.05, x2 + 0.05) +
                        currin1(x1 - 0.05, std::max(0.0, x2 - 0.05)));
    } else {  // park
      const double x1 = x(i, 0);
      const double x2 = x(i, 1);
      const double x3 = x(i, 2);
      const double x4 = x(i, 3);
      const double f1 = park1(x1, x2, x3, x4);
      y(i, 0) = f1;
      y(i, 1) = (1.0 + std::sin(x1)) / 10.0 * f1 - 2.0 * x1 + x2 * x2 +
                x3 * x3 + 0.5;
    }
  }
  return y;
}

}  // namespace dicm
