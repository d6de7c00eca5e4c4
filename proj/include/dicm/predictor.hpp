#pragma once

#include <cstdint>
#include <vector>

#include "dicm/dataset.hpp"
#include "dicm/sampler.hpp"

namespace dicm {

/// One layer's conditional at m prediction points: mean rows, per-point
/// conditional kernel variance (shared across the layer's columns) and the
/// plug-in coregionalization estimate that scales it.
struct LayerPredictive {
  Mat mean;       // m x S
  Vec cond_var;   // m, entries in [0, 1 + jitter]
  CoregEstimate coreg;
};

/// Posterior predictive moments at m test points, in natural output units.
struct Prediction {
  Mat mean;                // m x Q
  std::vector<Mat> cov;    // m matrices, Q x Q, symmetric PSD
  Index sample_count = 0;
};

struct PredictConfig {
  bool sample_latent_layer = true;  // false propagates the latent mean only
  bool student_t_latent = false;    // scale-mixture draws with n dof
};

/// Latent-layer conditional given one chain sample: mean row i is
/// k(x_i, X) K^{-1} W, cond_var_i = 1 - k(x_i, X) K^{-1} k(X, x_i).
/// x_star_unit must already be scaled to the unit cube.
LayerPredictive latent_conditional(const Mat& x_star_unit,
                                   const ChainSample& sample,
                                   const Dataset& train, double jitter);

/// Output-layer conditional with the sample's latent matrix as the design
/// and the standardized outputs as the conditioned data.
LayerPredictive output_conditional(const Mat& w_star, const ChainSample& sample,
                                   const Dataset& train, double jitter);

/// Draws row i as mean_i + sqrt(cond_var_i) * (L_B z_i) with z_i standard
/// normal: per-point marginal sampling with cross-column covariance
/// cond_var_i * B. student_t_dof > 0 divides each row's draw by
/// sqrt(chi^2_dof / dof).
Mat sample_latent(const LayerPredictive& pred, Rng& rng,
                  Index student_t_dof = 0);

/// Full layered prediction: per chain sample propagate x* through the
/// latent conditional (sampled or mean), condition the output layer, and
/// aggregate moments across samples by the law of total covariance. Results
/// are de-scaled to natural output units and each covariance is clipped to
/// the PSD cone.
Prediction predict(const Chain& chain, const Mat& x_star_natural,
                   const Dataset& train, std::uint64_t seed,
                   const PredictConfig& cfg = {});

}  // namespace dicm
