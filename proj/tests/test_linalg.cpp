#include "doctest.h"

#include <cmath>

#include "dicm/kernel.hpp"
#include "dicm/linalg.hpp"
#include "dicm/rng.hpp"

using namespace dicm;

namespace {

Mat random_spd(Index n, Rng& rng) {
  Mat a(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) a(i, j) = rng.normal();
  }
  Mat m = a * a.transpose() + 0.5 * static_cast<double>(n) * Mat::Identity(n, n);
  return 0.5 * (m + m.transpose());
}

Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

}  // namespace

TEST_CASE("sq_exp basic values") {
  Vec u(2), v(2);
  u << 0.3, -0.7;
  v = u;
  CHECK(sq_exp(u, v, 1.0) == doctest::Approx(1.0));

  v << 0.3 + 1.0, -0.7;  // squared distance 1
  CHECK(sq_exp(u, v, 1.0) == doctest::Approx(0.36787944).epsilon(1e-7));

  Vec a(1), b(1);
  a << 0.0;
  b << std::sqrt(2.0);  // squared distance 2
  CHECK(sq_exp(a, b, 2.0) == doctest::Approx(0.36787944).epsilon(1e-7));
}

TEST_CASE("sq_exp errors and symmetry") {
  Vec u(2), v(2), w(3);
  u << 0.0, 0.0;
  v << 1.0, 2.0;
  w << 0.0, 0.0, 0.0;
  CHECK_THROWS_AS(sq_exp(u, v, 0.0), DomainError);
  CHECK_THROWS_AS(sq_exp(u, v, -1.0), DomainError);
  CHECK_THROWS_AS(sq_exp(u, w, 1.0), ShapeError);

  Rng rng(11);
  for (int rep = 0; rep < 50; ++rep) {
    Vec p(3), q(3);
    for (Index i = 0; i < 3; ++i) {
      p(i) = rng.normal();
      q(i) = rng.normal();
    }
    const double theta = 0.1 + rng.uniform();
    CHECK(sq_exp(p, q, theta) == sq_exp(q, p, theta));
  }

  // Non-increasing in the squared distance for fixed theta.
  Vec z(1), step(1);
  z << 0.0;
  double prev = 2.0;
  for (int k = 0; k <= 20; ++k) {
    step << 0.1 * k;
    const double val = sq_exp(z, step, 0.7);
    CHECK(val <= prev);
    prev = val;
  }
}

TEST_CASE("kernel_matrix values and shape errors") {
  Mat one(1, 2);
  one << 0.4, 0.6;
  const Mat k1 = kernel_matrix(one, 1.0, 1e-8);
  CHECK(k1.rows() == 1);
  CHECK(k1(0, 0) == doctest::Approx(1.0 + 1e-8));

  Mat two(2, 1);
  two << 0.0, 1.0;  // squared distance 1
  const Mat k2 = kernel_matrix(two, 1.0, 0.0);
  CHECK(k2(0, 0) == 1.0);
  CHECK(k2(1, 1) == 1.0);
  CHECK(k2(0, 1) == doctest::Approx(std::exp(-1.0)));
  CHECK(k2(1, 0) == k2(0, 1));

  CHECK_THROWS_AS(kernel_matrix(Mat(0, 2), 1.0, 0.0), ShapeError);
  CHECK_THROWS_AS(kernel_matrix(two, 1.0, -1e-9), DomainError);
}

TEST_CASE("kernel_matrix symmetry and positive definiteness") {
  Rng rng(5);
  for (int rep = 0; rep < 20; ++rep) {
    const Index n = 2 + static_cast<Index>(rng.uniform_below(8));
    const Index d = 1 + static_cast<Index>(rng.uniform_below(3));
    Mat a(n, d);
    for (Index i = 0; i < n; ++i) {
      for (Index j = 0; j < d; ++j) a(i, j) = rng.uniform();
    }
    const double theta = 0.2 + rng.uniform();
    const Mat k = kernel_matrix(a, theta, 1e-8);
    CHECK((k - k.transpose()).cwiseAbs().maxCoeff() == 0.0);
    CHECK_NOTHROW(spd_factorize(k));
  }
}

TEST_CASE("cross_kernel") {
  Mat a(3, 2);
  a << 0.1, 0.2, 0.5, 0.8, 0.9, 0.3;
  const Mat self = cross_kernel(a, a, 0.7);
  const Mat via_kernel = kernel_matrix(a, 0.7, 0.0);
  CHECK((self - via_kernel).cwiseAbs().maxCoeff() == doctest::Approx(0.0));

  Mat b(1, 2);
  b << 0.5, 0.8;  // coincides with row 1 of a
  CHECK(cross_kernel(b, a, 0.7)(0, 1) == doctest::Approx(1.0));

  Mat u(1, 1), v(1, 1);
  u << 0.0;
  v << 2.0;  // squared distance 4
  CHECK(cross_kernel(u, v, 1.0)(0, 0) ==
        doctest::Approx(0.0183156).epsilon(1e-5));

  Mat w(1, 3);
  CHECK_THROWS_AS(cross_kernel(a, w, 1.0), ShapeError);
}

TEST_CASE("spd_factorize log-determinants and reconstruction") {
  CHECK(spd_factorize(Mat::Identity(3, 3)).log_det == doctest::Approx(0.0));

  Mat diag = Mat::Zero(2, 2);
  diag(0, 0) = 2.0;
  diag(1, 1) = 3.0;
  CHECK(spd_factorize(diag).log_det ==
        doctest::Approx(1.7917595).epsilon(1e-6));

  Rng rng(99);
  const Mat m = random_spd(5, rng);
  const SpdFactor f = spd_factorize(m);
  const Mat rebuilt = f.lower * f.lower.transpose();
  CHECK((rebuilt - m).norm() / m.norm() < 1e-8);
  double diag_sum = 0.0;
  for (Index i = 0; i < 5; ++i) diag_sum += std::log(f.lower(i, i));
  CHECK(f.log_det == doctest::Approx(2.0 * diag_sum));
}

TEST_CASE("spd_factorize failures") {
  Mat not_pd = Mat::Identity(3, 3);
  not_pd(2, 2) = -1.0;
  try {
    spd_factorize(not_pd);
    FAIL("expected FactorizationError");
  } catch (const FactorizationError& e) {
    CHECK(e.pivot == 2);
  }

  Mat asym(2, 2);
  asym << 1.0, 0.5, 0.2, 1.0;
  CHECK_THROWS_AS(spd_factorize(asym), DomainError);

  // Tiny asymmetry is averaged away.
  Mat nearly = Mat::Identity(2, 2);
  nearly(0, 1) = 1e-12;
  CHECK_NOTHROW(spd_factorize(nearly));
}

TEST_CASE("spd solve round trip") {
  Rng rng(7);
  for (int rep = 0; rep < 10; ++rep) {
    const Mat m = random_spd(6, rng);
    Vec b(6);
    for (Index i = 0; i < 6; ++i) b(i) = rng.normal();
    const SpdFactor f = spd_factorize(m);
    const Vec x = solve_spd(f, b);
    CHECK((m * x - b).norm() / b.norm() < 1e-8);
    CHECK(inv_quad(f, b) == doctest::Approx(b.dot(x)).epsilon(1e-10));
  }
}

TEST_CASE("kron_logdet") {
  CHECK(kron_logdet(Mat::Identity(2, 2), Mat::Identity(3, 3)) ==
        doctest::Approx(0.0));

  Mat b1(1, 1);
  b1 << 2.0;
  Mat k2 = Mat::Zero(2, 2);
  k2(0, 0) = 3.0;
  k2(1, 1) = 3.0;
  CHECK(kron_logdet(b1, k2) == doctest::Approx(3.5835189).epsilon(1e-6));

  Rng rng(21);
  for (int rep = 0; rep < 10; ++rep) {
    const Index s = 2 + static_cast<Index>(rng.uniform_below(4));  // up to 5
    const Index n = 2 + static_cast<Index>(rng.uniform_below(5));  // up to 6
    const Mat b = random_spd(s, rng);
    const Mat k = random_spd(n, rng);
    const double direct = spd_factorize(kron(b, k)).log_det;
    CHECK(kron_logdet(b, k) ==
          doctest::Approx(direct).epsilon(1e-8));
  }
}

TEST_CASE("factorize_kernel retries with escalated jitter") {
  Mat dup(2, 1);
  dup << 0.5, 0.5;  // identical rows
  // 1e-17 underflows against the unit diagonal; the 100x retry at 1e-15
  // still resolves the pivot.
  CHECK_NOTHROW(factorize_kernel(dup, 1.0, 1e-17));
  CHECK_THROWS_AS(factorize_kernel(dup, 1.0, 0.0), FactorizationError);
}
