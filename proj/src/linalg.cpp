#include "dicm/linalg.hpp"

#include <cmath>

namespace dicm {

void require_finite(const Mat& m, const char* what) {
  if (!m.allFinite()) {
    throw DataError(std::string(what) + ": non-finite entry");
  }
}

namespace {

// Unblocked lower Cholesky in place. Returns the failing pivot index, or -1
// on success. Hand-rolled so the failing pivot is available and the
// accumulation order is fixed.
Index cholesky_lower(Mat& a) {
  const Index n = a.rows();
  for (Index j = 0; j < n; ++j) {
    double d = a(j, j);
    for (Index k = 0; k < j; ++k) d -= a(j, k) * a(j, k);
    if (!(d > 0.0) || !std::isfinite(d)) return j;
    d = std::sqrt(d);
    a(j, j) = d;
    for (Index i = j + 1; i < n; ++i) {
      double s = a(i, j);
      for (Index k = 0; k < j; ++k) s -= a(i, k) * a(j, k);
      a(i, j) = s / d;
    }
  }
  a.triangularView<Eigen::StrictlyUpper>().setZero();
  return -1;
}

SpdFactor factorize_symmetrized(Mat sym) {
  Mat l = sym;
  const Index bad = cholesky_lower(l);
  if (bad >= 0) {
    throw FactorizationError("matrix is not positive definite", bad);
  }
  double log_det = 0.0;
  for (Index i = 0; i < l.rows(); ++i) log_det += std::log(l(i, i));
  log_det *= 2.0;
  return SpdFactor{std::move(sym), std::move(l), log_det};
}

Mat symmetrize_checked(const Mat& m) {
  if (m.rows() != m.cols()) {
    throw ShapeError("spd_factorize: matrix must be square");
  }
  if (m.rows() == 0) {
    throw ShapeError("spd_factorize: matrix is empty");
  }
  require_finite(m, "spd_factorize");
  const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-10) {
    throw DomainError("spd_factorize: matrix is not symmetric (max |M - M^T| = " +
                      std::to_string(asym) + ")");
  }
  return 0.5 * (m + m.transpose());
}

}  // namespace

SpdFactor spd_factorize(const Mat& m) {
  return factorize_symmetrized(symmetrize_checked(m));
}

SpdFactor spd_factorize(const Mat& m, double ridge) {
  if (ridge < 0.0) throw DomainError("spd_factorize: negative ridge");
  Mat sym = symmetrize_checked(m);
  const Index n = sym.rows();
  Mat ridged = sym + ridge * Mat::Identity(n, n);
  try {
    return factorize_symmetrized(std::move(ridged));
  } catch (const FactorizationError&) {
    if (ridge == 0.0) throw;
  }
  Mat ridged2 = sym + (100.0 * ridge) * Mat::Identity(n, n);
  return factorize_symmetrized(std::move(ridged2));
}

Mat solve_spd(const SpdFactor& f, const Mat& rhs) {
  if (rhs.rows() != f.size()) {
    throw ShapeError("solve_spd: rhs row count does not match factor");
  }
  Mat y = f.lower.triangularView<Eigen::Lower>().solve(rhs);
  return f.lower.transpose().triangularView<Eigen::Upper>().solve(y);
}

Vec solve_spd(const SpdFactor& f, const Vec& rhs) {
  if (rhs.size() != f.size()) {
    throw ShapeError("solve_spd: rhs size does not match factor");
  }
  Vec y = f.lower.triangularView<Eigen::Lower>().solve(rhs);
  return f.lower.transpose().triangularView<Eigen::Upper>().solve(y);
}

double inv_quad(const SpdFactor& f, const Vec& v) {
  if (v.size() != f.size()) {
    throw ShapeError("inv_quad: vector size does not match factor");
  }
  Vec y = f.lower.triangularView<Eigen::Lower>().solve(v);
  return y.squaredNorm();
}

double kron_logdet(const Mat& b, const Mat& k) {
  const SpdFactor fb = spd_factorize(b);
  const SpdFactor fk = spd_factorize(k);
  return static_cast<double>(k.rows()) * fb.log_det +
         static_cast<double>(b.rows()) * fk.log_det;
}

}  // namespace dicm
