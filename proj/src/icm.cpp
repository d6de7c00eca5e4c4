#include "dicm/icm.hpp"

#include <cmath>
#include <limits>

namespace dicm {

void PriorSpec::validate() const {
  if (!(shape > 0.0) || !(rate_theta_y > 0.0) || !(rate_theta_w > 0.0)) {
    throw DomainError("PriorSpec: shape and rates must be positive");
  }
}

CoregEstimate gls_coreg(const Mat& m, const SpdFactor& k_factor) {
  if (m.rows() != k_factor.size()) {
    throw ShapeError("gls_coreg: row count does not match kernel factor");
  }
  if (m.rows() < 1 || m.cols() < 1) {
    throw ShapeError("gls_coreg: empty data matrix");
  }
  const double n = static_cast<double>(m.rows());
  const Mat kinv_m = solve_spd(k_factor, m);
  Mat b = (m.transpose() * kinv_m) / n;
  b = 0.5 * (b + b.transpose()).eval();
  return CoregEstimate{std::move(b), m.rows()};
}

double log_marginal(const Mat& m, const SpdFactor& k_factor) {
  const Index n = m.rows();
  const Index s = m.cols();
  if (n <= s) {
    throw DegenerateLikelihoodError(
        "log_marginal: need n > S, got n = " + std::to_string(n) +
        ", S = " + std::to_string(s));
  }
  const CoregEstimate b = gls_coreg(m, k_factor);
  const Mat nb = static_cast<double>(n) * b.b_hat;
  double log_det_nb;
  try {
    log_det_nb = spd_factorize(nb).log_det;
  } catch (const FactorizationError&) {
    throw DegenerateLikelihoodError(
        "log_marginal: n * B_hat is singular");
  }
  return -0.5 * static_cast<double>(s) * k_factor.log_det -
         0.5 * static_cast<double>(n) * log_det_nb;
}

double log_gamma_prior(double theta, double shape, double rate) {
  if (!(shape > 0.0) || !(rate > 0.0)) {
    throw DomainError("log_gamma_prior: shape and rate must be positive");
  }
  if (!(theta > 0.0)) {
    return -std::numeric_limits<double>::infinity();
  }
  return (shape - 1.0) * std::log(theta) - rate * theta;
}

}  // namespace dicm
