#pragma once

#include <Eigen/Dense>

#include "dicm/errors.hpp"

namespace dicm {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using Index = Eigen::Index;

/// Throws DataError if any entry is NaN or infinite.
void require_finite(const Mat& m, const char* what);

/// Cholesky factor of a symmetric positive definite matrix together with
/// its log-determinant. Immutable after construction.
struct SpdFactor {
  Mat source;      // symmetrized input, source = lower * lower^T
  Mat lower;       // lower-triangular Cholesky factor
  double log_det;  // 2 * sum(log(diag(lower)))

  Index size() const { return lower.rows(); }
};

/// Factorizes a symmetric matrix (symmetry checked to 1e-10 absolute, then
/// the input is symmetrized by averaging with its transpose). Throws
/// FactorizationError carrying the failing pivot index if the matrix is not
/// positive definite.
SpdFactor spd_factorize(const Mat& m);

/// As above but adds ridge * I before factorizing; on failure retries once
/// with the ridge scaled by 100 before surfacing the error.
SpdFactor spd_factorize(const Mat& m, double ridge);

/// Solves source * X = rhs through the factor.
Mat solve_spd(const SpdFactor& f, const Mat& rhs);
Vec solve_spd(const SpdFactor& f, const Vec& rhs);

/// v^T * source^{-1} * v.
double inv_quad(const SpdFactor& f, const Vec& v);

/// log|B (x) K| = n log|B| + S log|K| for SPD B (S x S) and K (n x n),
/// computed without materializing the Kronecker product.
double kron_logdet(const Mat& b, const Mat& k);

}  // namespace dicm
