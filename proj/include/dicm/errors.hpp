#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dicm {

/// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Dimension or structural mismatch between operands.
struct ShapeError : Error {
  using Error::Error;
};

/// Argument outside its mathematical domain (non-positive lengthscale,
/// point outside declared bounds, lower >= upper, ...).
struct DomainError : Error {
  using Error::Error;
};

/// Cholesky factorization hit a non-positive pivot.
struct FactorizationError : Error {
  FactorizationError(const std::string& msg, std::ptrdiff_t pivot_index)
      : Error(msg + " (pivot " + std::to_string(pivot_index) + ")"),
        pivot(pivot_index) {}
  std::ptrdiff_t pivot;
};

/// Marginal likelihood is undefined for the given shapes (n <= S, or the
/// plug-in coregionalization estimate is singular).
struct DegenerateLikelihoodError : Error {
  using Error::Error;
};

/// Malformed or invalid input data (CSV syntax, NaN entries, row mismatches).
struct DataError : Error {
  DataError(const std::string& msg) : Error(msg), line(-1) {}
  DataError(const std::string& msg, long line_number)
      : Error(msg + " (line " + std::to_string(line_number) + ")"),
        line(line_number) {}
  long line;
};

/// Unknown name in a fixed vocabulary (benchmark functions).
struct LookupError : Error {
  using Error::Error;
};

/// Requested object would be unreasonably large (grid blow-up).
struct SizeError : Error {
  using Error::Error;
};

/// Every candidate was excluded as degenerate; nothing to select.
struct EmptyCandidatesError : Error {
  using Error::Error;
};

}  // namespace dicm
