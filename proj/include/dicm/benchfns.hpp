#pragma once

#include <string>
#include <vector>

#include "dicm/linalg.hpp"

namespace dicm {

/// Metadata for one synthetic multi-output test function.
struct BenchSpec {
  std::string name;
  Index d = 0;
  Index q = 0;
  Vec lower;  // per-dimension domain bounds
  Vec upper;
  Index default_n_train = 0;
  Index default_n_test = 0;
};

/// Known function names: forrester, convolved, dampedwave, perdikaris,
/// branin, mop2, currin, park. Throws LookupError otherwise.
const BenchSpec& bench_spec(const std::string& name);

/// Names of all benchmark functions, in a fixed order.
const std::vector<std::string>& bench_names();

/// Evaluates a benchmark on rows of x (natural domain, m x d) and returns
/// the m x Q output matrix. Throws DomainError for out-of-domain inputs.
Mat bench_evaluate(const std::string& name, const Mat& x);

}  // namespace dicm
