#pragma once

#include "dicm/linalg.hpp"

namespace dicm {

/// Default diagonal inflation for kernel matrices. Near-duplicate rows
/// during sequential design can need 1e-6.
inline constexpr double kDefaultJitter = 1e-8;

/// Isotropic squared-exponential correlation exp(-||u - v||^2 / theta).
double sq_exp(const Vec& u, const Vec& v, double theta);

/// n x n kernel matrix over the rows of a; diagonal entries are exactly
/// 1 + jitter.
Mat kernel_matrix(const Mat& a, double theta, double jitter);

/// m x n cross-kernel between the rows of a and b. No jitter.
Mat cross_kernel(const Mat& a, const Mat& b, double theta);

/// Squared Euclidean distances between all row pairs of a.
Mat pairwise_sqdist(const Mat& a);

/// Median / maximum off-diagonal squared distance (at least 1e-3), used for
/// data-scaled lengthscale starts and prior truncation.
double median_pairwise_sqdist(const Mat& a);
double max_pairwise_sqdist(const Mat& a);

/// Kernel matrix from a precomputed squared-distance matrix.
Mat kernel_from_sqdist(const Mat& d2, double theta, double jitter);

/// kernel_matrix followed by spd_factorize. If factorization fails and
/// jitter > 0, retries once with jitter * 100 before surfacing the error.
SpdFactor factorize_kernel(const Mat& a, double theta, double jitter);

/// As factorize_kernel, from a cached squared-distance matrix.
SpdFactor factorize_kernel_sqdist(const Mat& d2, double theta, double jitter);

}  // namespace dicm
