#pragma once

#include <vector>

#include "dicm/linalg.hpp"

namespace dicm {

/// Scores for one prediction run. mv_score is the exact median of
/// per_point_scores (mean of the middle two when the count is even).
struct MetricReport {
  Vec rmse;                // per output, >= 0
  Vec crps;                // per output, >= 0
  double mv_score = 0.0;   // higher is better
  Vec per_point_scores;    // one multivariate log score per scored point
  Index skipped_points = 0;  // points whose covariance stayed singular
  double wall_clock_seconds = 0.0;
};

/// Per-output root mean squared error between prediction means and truth.
Vec rmse(const Mat& pred_mean, const Mat& truth);

/// Negatively oriented Gaussian CRPS
///   sigma * [ z (2 Phi(z) - 1) + 2 phi(z) - 1/sqrt(pi) ],  z = (y - mu)/sigma.
/// Lower is better. sigma <= 0 is a domain error; sigma below 1e-12 is
/// floored to 1e-12.
double crps_gaussian(double mu, double sigma, double y);

/// Multivariate log score, median over test points of
///   -log|Sigma_i| - (y_i - mu_i)^T Sigma_i^{-1} (y_i - mu_i)
/// with each Sigma_i clipped to PSD and ridged by 1e-10 I before inversion.
/// No 1/2 factors or dimensional constants. Higher is better. Points whose
/// covariance is still singular are skipped and counted.
double mv_log_score(const Mat& pred_mean, const std::vector<Mat>& pred_cov,
                    const Mat& truth, Vec* per_point_scores = nullptr,
                    Index* skipped_points = nullptr);

/// Full report: per-output RMSE, per-output CRPS using the covariance
/// diagonals, and the multivariate log score. wall_clock_seconds is left 0.
MetricReport evaluate_metrics(const Mat& pred_mean,
                              const std::vector<Mat>& pred_cov,
                              const Mat& truth);

/// Exact median; mean of the middle two values for even length.
double median(Vec values);

/// Clips a symmetric matrix to the PSD cone by zeroing negative eigenvalues.
Mat psd_clip(const Mat& m);

}  // namespace dicm
