#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "dicm/dataset.hpp"
#include "dicm/icm.hpp"
#include "dicm/kernel.hpp"
#include "dicm/rng.hpp"

namespace dicm {

/// theta_w placeholder stored by single-layer chains (lengthscales are
/// strictly positive, so a negative value is unambiguous).
inline constexpr double kShallowThetaSentinel = -1.0;

struct SamplerConfig {
  Index iterations = 5000;
  Index burn_in = 1000;
  Index thinning = 2;
  double proposal_l = 1.0;
  double proposal_u = 2.0;
  std::uint64_t seed = 0;
  double jitter = kDefaultJitter;
  Index ess_max_shrinks = 100;
  Index ess_substeps = 3;        // latent updates per Gibbs sweep
  double ess_prior_blend = 0.8;  // blend of the slice-prior coregionalization
                                 // toward the trace-matched isotropic matrix

  void validate() const;
};

/// One posterior draw. For single-layer chains theta_w holds the sentinel,
/// w holds the scaled inputs and b_hat_w is empty.
struct ChainSample {
  double theta_w = kShallowThetaSentinel;
  double theta_y = 0.0;
  Mat w;  // n x D latent matrix (scaled inputs when shallow)
  CoregEstimate b_hat_w;
  CoregEstimate b_hat_y;
};

struct ModelMeta {
  Index n = 0;
  Index d = 0;
  Index q = 0;
  Index latent_dim = 0;
  int layers = 2;
  Vec x_lower, x_upper, y_center, y_scale;
};

struct ChainDiagnostics {
  double accept_theta_w = 0.0;
  double accept_theta_y = 0.0;
  double mean_ess_shrinks = 0.0;
  Index likelihood_failures = 0;
};

/// Ordered post-burn-in, thinned posterior samples plus the configuration
/// that produced them. Immutable after run_chain returns.
struct Chain {
  std::vector<ChainSample> samples;
  SamplerConfig config;
  ModelMeta meta;
  PriorSpec priors;
  ChainDiagnostics diagnostics;

  bool shallow() const { return meta.layers == 1; }
  Index size() const { return static_cast<Index>(samples.size()); }
};

/// Uniform draw on [l * prev / u, u * prev / l]; with l = 1, u = 2 the
/// window is [prev/2, 2 prev]. l = u returns prev exactly.
double propose_lengthscale(double theta_prev, double l, double u, Rng& rng);

struct MhResult {
  double theta = 0.0;
  bool accepted = false;
  bool failed = false;  // likelihood evaluation threw; treated as rejection
};

/// One sliding-window MH update. The acceptance ratio carries the
/// theta_prev / theta_star proposal-asymmetry correction. log_lik may throw
/// FactorizationError or DegenerateLikelihoodError, which counts as a
/// rejection.
MhResult mh_update_lengthscale(double theta_prev, double l, double u,
                               const std::function<double(double)>& log_lik,
                               const std::function<double(double)>& log_prior,
                               Rng& rng);

/// Draw from the matrix-normal prior: L_K * Z * L_B^T with Z an n x D
/// matrix of independent standard normals (filled column-major), so the
/// column-stacked vectorization has covariance B (x) K.
Mat draw_matrix_normal_prior(const SpdFactor& k_factor,
                             const SpdFactor& b_factor, Rng& rng);

struct EssResult {
  Mat w;
  Index shrinks = 0;
  bool accepted = false;  // false when the shrink budget forced the fallback
  double log_lik = 0.0;   // log-likelihood of the returned state
};

/// Optional instrumentation for tests: bracket widths after each draw.
struct EssTrace {
  std::vector<double> widths;
};

/// One elliptical-slice update of the whole latent matrix. Draws an angle
/// on (0, 2pi) with bracket (gamma - 2pi, gamma); proposes
/// W* = W cos(gamma) + W_prior sin(gamma); accepts with probability
/// min(1, exp(log_lik(W*) - log_lik_cur)); otherwise shrinks the bracket
/// toward 0 on the rejected side and redraws, up to max_shrinks, after
/// which the current state is returned (the gamma -> 0 limit).
EssResult ess_step_w(const Mat& w_current, const Mat& w_prior,
                     double log_lik_current,
                     const std::function<double(const Mat&)>& log_lik,
                     Rng& rng, Index max_shrinks, EssTrace* trace = nullptr);

/// Runs the Gibbs loop: per iteration an MH update of theta_w, an MH update
/// of theta_y, and an ESS update of W. layers = 1 fixes W to the scaled
/// inputs and samples theta_y only. latent_dim = 0 selects max(d, Q).
Chain run_chain(const Dataset& data, const SamplerConfig& config,
                int layers = 2, Index latent_dim = 0,
                const PriorSpec& priors = {});

}  // namespace dicm
