#include "dicm/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace dicm {

namespace {

void check_theta(double theta) {
  if (!(theta > 0.0) || !std::isfinite(theta)) {
    throw DomainError("lengthscale must be positive, got " +
                      std::to_string(theta));
  }
}

void check_jitter(double jitter) {
  if (jitter < 0.0 || !std::isfinite(jitter)) {
    throw DomainError("jitter must be non-negative");
  }
}

}  // namespace

double sq_exp(const Vec& u, const Vec& v, double theta) {
  check_theta(theta);
  if (u.size() != v.size()) {
    throw ShapeError("sq_exp: point dimensions differ");
  }
  return std::exp(-(u - v).squaredNorm() / theta);
}

Mat pairwise_sqdist(const Mat& a) {
  const Index n = a.rows();
  Mat d2(n, n);
  for (Index i = 0; i < n; ++i) {
    d2(i, i) = 0.0;
    for (Index j = i + 1; j < n; ++j) {
      const double d = (a.row(i) - a.row(j)).squaredNorm();
      d2(i, j) = d;
      d2(j, i) = d;
    }
  }
  return d2;
}

double median_pairwise_sqdist(const Mat& a) {
  const Mat d2 = pairwise_sqdist(a);
  std::vector<double> vals;
  for (Index i = 0; i < d2.rows(); ++i) {
    for (Index j = i + 1; j < d2.cols(); ++j) vals.push_back(d2(i, j));
  }
  if (vals.empty()) return 1e-3;
  std::sort(vals.begin(), vals.end());
  const std::size_t m = vals.size();
  const double med =
      (m % 2 == 1) ? vals[m / 2] : 0.5 * (vals[m / 2 - 1] + vals[m / 2]);
  return std::max(med, 1e-3);
}

double max_pairwise_sqdist(const Mat& a) {
  const Mat d2 = pairwise_sqdist(a);
  double best = 1e-3;
  for (Index i = 0; i < d2.rows(); ++i) {
    for (Index j = i + 1; j < d2.cols(); ++j) best = std::max(best, d2(i, j));
  }
  return best;
}

Mat kernel_from_sqdist(const Mat& d2, double theta, double jitter) {
  check_theta(theta);
  check_jitter(jitter);
  const Index n = d2.rows();
  Mat k(n, n);
  for (Index i = 0; i < n; ++i) {
    k(i, i) = 1.0 + jitter;
    for (Index j = i + 1; j < n; ++j) {
      const double v = std::exp(-d2(i, j) / theta);
      k(i, j) = v;
      k(j, i) = v;
    }
  }
  return k;
}

Mat kernel_matrix(const Mat& a, double theta, double jitter) {
  if (a.rows() == 0) {
    throw ShapeError("kernel_matrix: empty design");
  }
  check_theta(theta);
  check_jitter(jitter);
  return kernel_from_sqdist(pairwise_sqdist(a), theta, jitter);
}

Mat cross_kernel(const Mat& a, const Mat& b, double theta) {
  check_theta(theta);
  if (a.cols() != b.cols()) {
    throw ShapeError("cross_kernel: column counts differ");
  }
  Mat k(a.rows(), b.rows());
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < b.rows(); ++j) {
      k(i, j) = std::exp(-(a.row(i) - b.row(j)).squaredNorm() / theta);
    }
  }
  return k;
}

namespace {

SpdFactor factorize_with_retry(const Mat& d2, double theta, double jitter) {
  try {
    return spd_factorize(kernel_from_sqdist(d2, theta, jitter));
  } catch (const FactorizationError&) {
    if (jitter == 0.0) throw;
  }
  return spd_factorize(kernel_from_sqdist(d2, theta, jitter * 100.0));
}

}  // namespace

SpdFactor factorize_kernel(const Mat& a, double theta, double jitter) {
  if (a.rows() == 0) {
    throw ShapeError("factorize_kernel: empty design");
  }
  check_theta(theta);
  check_jitter(jitter);
  return factorize_with_retry(pairwise_sqdist(a), theta, jitter);
}

SpdFactor factorize_kernel_sqdist(const Mat& d2, double theta, double jitter) {
  check_theta(theta);
  check_jitter(jitter);
  return factorize_with_retry(d2, theta, jitter);
}

}  // namespace dicm
