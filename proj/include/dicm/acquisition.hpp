#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "dicm/dataset.hpp"
#include "dicm/metrics.hpp"
#include "dicm/predictor.hpp"
#include "dicm/sampler.hpp"

namespace dicm {

struct AcquisitionConfig {
  Mat candidates;  // c x d, natural units
  Mat reference;   // r x d, natural units
  bool use_fast_update = true;
  enum class LatentMap { sample, mean } latent_mapping = LatentMap::sample;
  double duplicate_tol = 1e-10;  // scaled distance below which a candidate
                                 // coincides with a design row
};

struct AcquisitionResult {
  Vec scores;                // one per candidate; +inf marks excluded/failed
  Index selected_index = 0;  // argmin, ties broken by lowest index
  Vec selected_point;        // natural units
};

/// Precomputed conditioning state for one unaugmented design: the kernel
/// factor of K(design) plus the constants needed by the rank-one update.
struct ConditioningBase {
  Mat design;  // n x D
  double theta = 0.0;
  double jitter = 0.0;
  SpdFactor factor;  // of kernel_matrix(design, theta, jitter)

  ConditioningBase(Mat design_in, double theta_in, double jitter_in);

  /// k(point, design) as a vector of length n.
  Vec kernel_row(const Vec& point) const;

  /// Unaugmented quadratic form k(p, W) K^{-1} k(W, p).
  double quadform(const Vec& point) const;
};

/// Augmented quadratic form k(w_ref, W+) K(W+)^{-1} k(W+, w_ref) where W+
/// appends w_new to the design, evaluated through the partitioned inverse:
///   q0 + v (a h)^2 + 2 z (a h) + z^2 / v,
/// v = (1 + jitter) - k(w_new, W) K^{-1} k(W, w_new), h = -K^{-1} k(W, w_new)/v,
/// z = k(w_new, w_ref), a = k(w_ref, W). O(n) per reference point once the
/// candidate products are formed. Near-duplicate candidates
/// (v <= 10 * jitter) fall back to factorizing the augmented matrix.
double fast_variance_update(const Vec& w_ref, const Vec& w_new,
                            const ConditioningBase& base);

/// ALC score of one candidate location (natural units):
///   (1/|T|) (1/r) sum_t sum_ref (1 - augmented quadform)^Q
/// with the candidate and reference points mapped into each sample's latent
/// space. Lower is better.
double alc_score(const Vec& candidate_natural, const Chain& chain,
                 const AcquisitionConfig& config, const Dataset& train,
                 std::uint64_t seed);

/// Scores every candidate (excluding near-duplicates of design rows) and
/// returns the argmin. Deterministic given (chain, config, seed); duplicate
/// candidate coordinates receive identical latent draws, so duplicating the
/// candidate list cannot change the selected point.
AcquisitionResult select_next(const Chain& chain,
                              const AcquisitionConfig& config,
                              const Dataset& train, std::uint64_t seed);

/// Reference-averaged residual predictive variance of the current fit
/// (the ALC integrand without augmentation): (1/|T|)(1/r) sum (1 - q0)^Q.
double reference_variance(const Chain& chain, const Mat& reference_natural,
                          const Dataset& train,
                          const AcquisitionConfig& config, std::uint64_t seed);

enum class DesignMode { alc, random, indep_alc };

struct DesignStep {
  Index step = 0;      // 1-based
  Vec x_selected;      // natural units
  double score = 0.0;  // ALC value of the selected point (NaN for random)
  double ref_variance = 0.0;
  double seconds = 0.0;
  std::optional<MetricReport> metrics;  // filled when a test set is given
};

struct DesignResult {
  Dataset data;
  std::vector<DesignStep> steps;
  double final_ref_variance = 0.0;  // from a final fit on the grown design
};

using Simulator = std::function<Mat(const Mat&)>;

/// Sequential design: repeats {fit -> select -> evaluate -> append} for the
/// requested number of steps, then fits once more to report the final
/// reference-averaged residual variance. on_step (if given) runs after each
/// append, so partial designs survive a mid-loop simulator failure.
DesignResult design_loop(
    const Simulator& simulator, Index steps, Dataset data,
    const SamplerConfig& sampler_config, int layers, Index latent_dim,
    const AcquisitionConfig& acq_config, DesignMode mode, std::uint64_t seed,
    const Mat* test_x = nullptr, const Mat* test_y = nullptr,
    const std::function<void(const DesignStep&, const Dataset&)>& on_step = {});

}  // namespace dicm
