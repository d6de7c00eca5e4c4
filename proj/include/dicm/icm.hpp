#pragma once

#include "dicm/linalg.hpp"

namespace dicm {

/// Gamma prior hyperparameters for the two lengthscales. The latent-layer
/// rate is larger so the latent warp is smoother a priori than the output
/// layer.
struct PriorSpec {
  double shape = 1.5;
  double rate_theta_y = 3.9 / 6.0;
  double rate_theta_w = 3.9 / 4.0;

  void validate() const;
};

/// Plug-in GLS estimate of a coregionalization matrix: M^T K^{-1} M / n,
/// symmetrized. Symmetric positive semi-definite by construction.
struct CoregEstimate {
  Mat b_hat;
  Index sample_size = 0;

  Index width() const { return b_hat.rows(); }
  bool empty() const { return b_hat.rows() == 0; }
};

CoregEstimate gls_coreg(const Mat& m, const SpdFactor& k_factor);

/// Marginal log-likelihood of an ICM layer with the coregionalization
/// matrix integrated out under its Jeffreys prior:
///   -(S/2) log|K| - (n/2) log|n B_hat|,  B_hat = M^T K^{-1} M / n.
/// The fixed proportionality constant is dropped; every consumer works with
/// differences of these values, so the constant cancels.
double log_marginal(const Mat& m, const SpdFactor& k_factor);

/// Unnormalized Gamma log-density (shape - 1) log(theta) - rate * theta;
/// -infinity for theta outside the support.
double log_gamma_prior(double theta, double shape, double rate);

}  // namespace dicm
