#include "dicm/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace dicm {

void SamplerConfig::validate() const {
  if (iterations < 1) throw DomainError("SamplerConfig: iterations < 1");
  if (burn_in < 0 || burn_in >= iterations) {
    throw DomainError("SamplerConfig: need 0 <= burn_in < iterations");
  }
  if (thinning < 1) throw DomainError("SamplerConfig: thinning < 1");
  if (!(proposal_l > 0.0) || !(proposal_l < proposal_u)) {
    throw DomainError("SamplerConfig: need 0 < proposal_l < proposal_u");
  }
  if (jitter < 0.0) throw DomainError("SamplerConfig: negative jitter");
  if (ess_max_shrinks < 1) throw DomainError("SamplerConfig: ess_max_shrinks < 1");
  if (ess_substeps < 1) throw DomainError("SamplerConfig: ess_substeps < 1");
  if (ess_prior_blend < 0.0 || ess_prior_blend > 1.0) {
    throw DomainError("SamplerConfig: ess_prior_blend must be in [0, 1]");
  }
}

double propose_lengthscale(double theta_prev, double l, double u, Rng& rng) {
  if (!(theta_prev > 0.0)) {
    throw DomainError("propose_lengthscale: theta_prev must be positive");
  }
  if (!(l > 0.0) || !(u >= l)) {
    throw DomainError("propose_lengthscale: need 0 < l <= u");
  }
  const double lo = l * theta_prev / u;
  const double hi = u * theta_prev / l;
  if (lo == hi) return theta_prev;
  return rng.uniform(lo, hi);
}

MhResult mh_update_lengthscale(double theta_prev, double l, double u,
                               const std::function<double(double)>& log_lik,
                               const std::function<double(double)>& log_prior,
                               Rng& rng) {
  const double theta_star = propose_lengthscale(theta_prev, l, u, rng);
  double log_alpha;
  try {
    log_alpha = log_lik(theta_star) + log_prior(theta_star) -
                log_lik(theta_prev) - log_prior(theta_prev) +
                std::log(theta_prev / theta_star);
  } catch (const FactorizationError&) {
    return MhResult{theta_prev, false, true};
  } catch (const DegenerateLikelihoodError&) {
    return MhResult{theta_prev, false, true};
  }
  const double u_draw = rng.uniform_pos();
  const bool accepted = (log_alpha >= 0.0) || (std::log(u_draw) < log_alpha);
  return MhResult{accepted ? theta_star : theta_prev, accepted, false};
}

Mat draw_matrix_normal_prior(const SpdFactor& k_factor,
                             const SpdFactor& b_factor, Rng& rng) {
  const Index n = k_factor.size();
  const Index s = b_factor.size();
  Mat z(n, s);
  for (Index j = 0; j < s; ++j) {
    for (Index i = 0; i < n; ++i) z(i, j) = rng.normal();
  }
  return k_factor.lower * z * b_factor.lower.transpose();
}

EssResult ess_step_w(const Mat& w_current, const Mat& w_prior,
                     double log_lik_current,
                     const std::function<double(const Mat&)>& log_lik,
                     Rng& rng, Index max_shrinks, EssTrace* trace) {
  double gamma = rng.uniform(0.0, kTwoPi);
  double gamma_min = gamma - kTwoPi;
  double gamma_max = gamma;
  // One slice threshold per update: a fresh proposal is accepted with
  // probability min(1, L(W*)/L(W)) marginally, and the threshold is held
  // fixed while the bracket shrinks (only the angle is redrawn).
  const double log_threshold =
      log_lik_current + std::log(rng.uniform_pos());
  if (trace != nullptr) trace->widths.push_back(gamma_max - gamma_min);

  for (Index shrink = 0; shrink <= max_shrinks; ++shrink) {
    const Mat w_star =
        w_current * std::cos(gamma) + w_prior * std::sin(gamma);
    double ll_star;
    try {
      ll_star = log_lik(w_star);
    } catch (const FactorizationError&) {
      ll_star = -std::numeric_limits<double>::infinity();
    } catch (const DegenerateLikelihoodError&) {
      ll_star = -std::numeric_limits<double>::infinity();
    }
    if (ll_star > log_threshold) {
      return EssResult{w_star, shrink, true, ll_star};
    }
    if (shrink == max_shrinks) break;
    if (gamma < 0.0) {
      gamma_min = gamma;
    } else {
      gamma_max = gamma;
    }
    gamma = rng.uniform(gamma_min, gamma_max);
    if (trace != nullptr) trace->widths.push_back(gamma_max - gamma_min);
  }
  // Shrink budget exhausted: keep the current state (the gamma -> 0 limit
  // is likelihood-neutral).
  return EssResult{w_current, max_shrinks, false, log_lik_current};
}

namespace {

// Gamma log-prior truncated to a distance-scaled support. Beyond a few
// multiples of the largest design distance the kernel matrix sits at the
// jitter floor and the marginalized likelihood rewards the degeneracy
// itself, so lengthscales are confined to the scales the data can inform.
double truncated_gamma_prior(double theta, double shape, double rate,
                             double theta_min, double theta_max) {
  if (theta < theta_min || theta > theta_max) {
    return -std::numeric_limits<double>::infinity();
  }
  return log_gamma_prior(theta, shape, rate);
}

// Coarse profile scan for the initial lengthscale: argmax of the layer's
// conditional log-posterior over a log-spaced grid. Starts the chain inside
// the data-fitting basin; the posterior also carries broad underfitting
// modes that short chains cannot escape from.
double profile_theta_init(const Mat& values, const Mat& dist2, double jitter,
                          double shape, double rate, double theta_min,
                          double theta_max) {
  const double lo = std::max(theta_min, 1e-3);
  const Index grid = 30;
  double best_theta = std::sqrt(lo * theta_max);
  double best_value = -std::numeric_limits<double>::infinity();
  for (Index k = 0; k < grid; ++k) {
    const double frac = static_cast<double>(k) / static_cast<double>(grid - 1);
    const double theta = lo * std::pow(theta_max / lo, frac);
    double value;
    try {
      const SpdFactor f = factorize_kernel_sqdist(dist2, theta, jitter);
      value = log_marginal(values, f) + log_gamma_prior(theta, shape, rate);
    } catch (const FactorizationError&) {
      continue;
    } catch (const DegenerateLikelihoodError&) {
      continue;
    }
    if (value > best_value) {
      best_value = value;
      best_theta = theta;
    }
  }
  return best_theta;
}

// Initial latent matrix: the first d latent columns are the scaled input
// columns, standardized (an identity-like warp). Columns beyond d are
// drawn from N(0, K) at the starting latent lengthscale: copying inputs
// there would make the plug-in coregionalization estimate near-singular,
// while rough iid noise carries enormous energy under K^{-1} and blows up
// the first elliptical-slice prior draws. Smooth unit-variance draws avoid
// both failure modes.
Mat initial_latent(const Mat& x_unit, Index latent_dim,
                   const SpdFactor& k_init, Rng& init_rng) {
  const Index n = x_unit.rows();
  const Index d = x_unit.cols();
  Mat w(n, latent_dim);
  for (Index j = 0; j < latent_dim; ++j) {
    if (j < d) {
      w.col(j) = x_unit.col(j);
      const double mean = w.col(j).mean();
      double sd = std::sqrt((w.col(j).array() - mean).square().mean());
      if (!(sd > 1e-12)) sd = 1.0;
      w.col(j) = (w.col(j).array() - mean) / sd;
    } else {
      Vec z(n);
      for (Index i = 0; i < n; ++i) z(i) = init_rng.normal();
      w.col(j) = k_init.lower * z;
    }
  }
  return w;
}

}  // namespace

Chain run_chain(const Dataset& data, const SamplerConfig& config, int layers,
                Index latent_dim, const PriorSpec& priors) {
  config.validate();
  priors.validate();
  if (layers != 1 && layers != 2) {
    throw DomainError("run_chain: layers must be 1 or 2");
  }
  const Index n = data.n();
  const Index d = data.d();
  const Index q = data.q();
  const Index latent = (layers == 1) ? d
                       : (latent_dim > 0 ? latent_dim : std::max(d, q));
  if (n <= std::max({d, latent, q})) {
    throw DomainError("run_chain: need n > max(d, D, Q)");
  }

  const Mat& xs = data.x_unit;
  const Mat& ys = data.y_std;
  const Mat dist2_x = pairwise_sqdist(xs);
  Rng rng(config.seed);

  Chain chain;
  chain.config = config;
  chain.priors = priors;
  chain.meta = ModelMeta{n,          d,
                         q,          latent,
                         layers,     data.x_lower,
                         data.x_upper, data.y_center,
                         data.y_scale};

  const bool deep = (layers == 2);
  Rng init_rng(derive_stream(config.seed, 0x1a17ULL));
  Mat w = xs;
  if (deep) {
    const SpdFactor k_init = factorize_kernel_sqdist(
        dist2_x, median_pairwise_sqdist(xs), config.jitter);
    w = initial_latent(xs, latent, k_init, init_rng);
  }
  const double theta_min = 1e-6;
  const double theta_w_max = 0.3 * max_pairwise_sqdist(xs);
  const double theta_y_max = 5.0 * max_pairwise_sqdist(w);
  double theta_w =
      deep ? profile_theta_init(w, dist2_x, config.jitter, priors.shape,
                                priors.rate_theta_w, theta_min, theta_w_max)
           : 1.0;  // unused in shallow mode
  double theta_y =
      profile_theta_init(ys, pairwise_sqdist(w), config.jitter, priors.shape,
                         priors.rate_theta_y, theta_min, theta_y_max);

  SpdFactor kw;
  double ll_w = 0.0;
  if (deep) {
    kw = factorize_kernel_sqdist(dist2_x, theta_w, config.jitter);
    ll_w = log_marginal(w, kw);
  }
  SpdFactor ky = factorize_kernel(w, theta_y, config.jitter);
  double ll_y = log_marginal(ys, ky);

  const Index expected =
      (config.iterations - config.burn_in) / config.thinning;
  chain.samples.reserve(static_cast<std::size_t>(expected));

  Index accept_w = 0;
  Index accept_y = 0;
  Index failures = 0;
  double total_shrinks = 0.0;
  Index ess_steps = 0;

  Index current_iter = 0;
  try {
  for (Index t = 2; t <= config.iterations; ++t) {
    current_iter = t;
    if (deep) {
      // Latent-layer lengthscale.
      SpdFactor kw_star;
      double ll_w_star = 0.0;
      const auto lik_w = [&](double theta) {
        if (theta == theta_w) return ll_w;
        kw_star = factorize_kernel_sqdist(dist2_x, theta, config.jitter);
        ll_w_star = log_marginal(w, kw_star);
        return ll_w_star;
      };
      const auto prior_w = [&](double theta) {
        return truncated_gamma_prior(theta, priors.shape, priors.rate_theta_w,
                                     theta_min, theta_w_max);
      };
      const MhResult rw = mh_update_lengthscale(
          theta_w, config.proposal_l, config.proposal_u, lik_w, prior_w, rng);
      if (rw.failed) ++failures;
      if (rw.accepted) {
        ++accept_w;
        if (rw.theta != theta_w) {
          theta_w = rw.theta;
          kw = std::move(kw_star);
          ll_w = ll_w_star;
        }
      }
    }

    {
      // Output-layer lengthscale; the conditioning design is the current
      // latent matrix (the scaled inputs when shallow).
      const Mat dist2_w = pairwise_sqdist(w);
      SpdFactor ky_star;
      double ll_y_star = 0.0;
      const auto lik_y = [&](double theta) {
        if (theta == theta_y) return ll_y;
        ky_star = factorize_kernel_sqdist(dist2_w, theta, config.jitter);
        ll_y_star = log_marginal(ys, ky_star);
        return ll_y_star;
      };
      const auto prior_y = [&](double theta) {
        return truncated_gamma_prior(theta, priors.shape, priors.rate_theta_y,
                                     theta_min, theta_y_max);
      };
      const MhResult ry = mh_update_lengthscale(
          theta_y, config.proposal_l, config.proposal_u, lik_y, prior_y, rng);
      if (ry.failed) ++failures;
      if (ry.accepted) {
        ++accept_y;
        if (ry.theta != theta_y) {
          theta_y = ry.theta;
          ky = std::move(ky_star);
          ll_y = ll_y_star;
        }
      }
    }

    if (deep) {
      // ESS over the whole latent matrix. The plug-in coregionalization
      // estimate is refreshed once per sweep and held fixed across shrinks.
      // Trace-preserving conditioning of the plug-in: the raw estimate
      // feeds back on itself (near-collinear W concentrates the next prior
      // draws on still-more-collinear configurations) and the chain would
      // otherwise collapse into a rank-deficient latent state. Blending
      // toward the isotropic matrix of equal trace bounds the condition
      // number without inflating the draw scale.
      const CoregEstimate bw = gls_coreg(w, kw);
      const double iso = bw.b_hat.trace() / static_cast<double>(latent);
      const Mat bw_blend =
          (1.0 - config.ess_prior_blend) * bw.b_hat +
          (config.ess_prior_blend * iso) * Mat::Identity(latent, latent);
      const SpdFactor bw_factor = spd_factorize(bw_blend, 1e-12);
      const auto lik_of_w = [&](const Mat& w_star) {
        // Proposals whose latent marginal is numerically degenerate (near
        // rank-deficient W) are out of support; the throw from this probe
        // becomes a rejection inside the slice loop.
        (void)log_marginal(w_star, kw);
        const SpdFactor f = factorize_kernel(w_star, theta_y, config.jitter);
        return log_marginal(ys, f);
      };
      bool moved = false;
      for (Index sub = 0; sub < config.ess_substeps; ++sub) {
        const Mat w_prior = draw_matrix_normal_prior(kw, bw_factor, rng);
        const EssResult er = ess_step_w(w, w_prior, ll_y, lik_of_w, rng,
                                        config.ess_max_shrinks);
        total_shrinks += static_cast<double>(er.shrinks);
        ++ess_steps;
        if (er.accepted) {
          w = er.w;
          ll_y = er.log_lik;
          moved = true;
        }
      }
      if (moved) {
        ky = factorize_kernel(w, theta_y, config.jitter);
        ll_w = log_marginal(w, kw);
      }
    }

    if (t > config.burn_in && (t - config.burn_in) % config.thinning == 0) {
      ChainSample sample;
      sample.theta_w = deep ? theta_w : kShallowThetaSentinel;
      sample.theta_y = theta_y;
      sample.w = w;
      if (deep) sample.b_hat_w = gls_coreg(w, kw);
      sample.b_hat_y = gls_coreg(ys, ky);
      chain.samples.push_back(std::move(sample));
    }
  }
  } catch (const DegenerateLikelihoodError& e) {
    throw DegenerateLikelihoodError(
        "iteration " + std::to_string(current_iter) + ": " + e.what());
  }

  const double proposals = static_cast<double>(config.iterations - 1);
  chain.diagnostics.accept_theta_w =
      deep ? static_cast<double>(accept_w) / proposals : 0.0;
  chain.diagnostics.accept_theta_y =
      static_cast<double>(accept_y) / proposals;
  chain.diagnostics.mean_ess_shrinks =
      ess_steps > 0 ? total_shrinks / static_cast<double>(ess_steps) : 0.0;
  chain.diagnostics.likelihood_failures = failures;

  if (chain.size() != expected) {
    throw Error("run_chain: internal sample-count mismatch");
  }
  return chain;
}

}  // namespace dicm
