#include "dicm/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace dicm {

namespace {

constexpr double kSqrtPi = 1.7724538509055160273;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;

double normal_pdf(double z) { return kInvSqrt2Pi * std::exp(-0.5 * z * z); }

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

}  // namespace

Vec rmse(const Mat& pred_mean, const Mat& truth) {
  if (pred_mean.rows() != truth.rows() || pred_mean.cols() != truth.cols()) {
    throw ShapeError("rmse: shape mismatch");
  }
  if (pred_mean.rows() == 0) {
    throw ShapeError("rmse: no test points");
  }
  Vec out(pred_mean.cols());
  for (Index q = 0; q < pred_mean.cols(); ++q) {
    out(q) = std::sqrt((pred_mean.col(q) - truth.col(q)).squaredNorm() /
                       static_cast<double>(pred_mean.rows()));
  }
  return out;
}

double crps_gaussian(double mu, double sigma, double y) {
  if (!(sigma > 0.0)) {
    throw DomainError("crps_gaussian: sigma must be positive");
  }
  sigma = std::max(sigma, 1e-12);
  const double z = (y - mu) / sigma;
  return sigma *
         (z * (2.0 * normal_cdf(z) - 1.0) + 2.0 * normal_pdf(z) - 1.0 / kSqrtPi);
}

double median(Vec values) {
  const Index m = values.size();
  if (m == 0) throw ShapeError("median: empty input");
  std::sort(values.data(), values.data() + m);
  if (m % 2 == 1) return values(m / 2);
  return 0.5 * (values(m / 2 - 1) + values(m / 2));
}

Mat psd_clip(const Mat& m) {
  const Mat sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Mat> es(sym);
  if (es.eigenvalues().minCoeff() >= 0.0) return sym;
  Vec ev = es.eigenvalues();
  for (Index i = 0; i < ev.size(); ++i) ev(i) = std::max(ev(i), 0.0);
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

double mv_log_score(const Mat& pred_mean, const std::vector<Mat>& pred_cov,
                    const Mat& truth, Vec* per_point_scores,
                    Index* skipped_points) {
  const Index m = pred_mean.rows();
  const Index q = pred_mean.cols();
  if (truth.rows() != m || truth.cols() != q) {
    throw ShapeError("mv_log_score: truth shape mismatch");
  }
  if (static_cast<Index>(pred_cov.size()) != m) {
    throw ShapeError("mv_log_score: covariance count mismatch");
  }
  std::vector<double> scores;
  scores.reserve(static_cast<std::size_t>(m));
  Index skipped = 0;
  for (Index i = 0; i < m; ++i) {
    Mat sigma = psd_clip(pred_cov[static_cast<std::size_t>(i)]) +
                1e-10 * Mat::Identity(q, q);
    SpdFactor f;
    try {
      f = spd_factorize(sigma);
    } catch (const FactorizationError&) {
      ++skipped;
      continue;
    }
    const Vec r = (truth.row(i) - pred_mean.row(i)).transpose();
    scores.push_back(-f.log_det - inv_quad(f, r));
  }
  if (skipped_points != nullptr) *skipped_points = skipped;
  if (scores.empty()) {
    throw DegenerateLikelihoodError("mv_log_score: every point was skipped");
  }
  Vec sc = Eigen::Map<const Vec>(scores.data(),
                                 static_cast<Index>(scores.size()));
  if (per_point_scores != nullptr) *per_point_scores = sc;
  return median(sc);
}

MetricReport evaluate_metrics(const Mat& pred_mean,
                              const std::vector<Mat>& pred_cov,
                              const Mat& truth) {
  MetricReport report;
  report.rmse = rmse(pred_mean, truth);
  const Index m = pred_mean.rows();
  const Index q = pred_mean.cols();
  report.crps = Vec::Zero(q);
  for (Index k = 0; k < q; ++k) {
    double acc = 0.0;
    for (Index i = 0; i < m; ++i) {
      const double var = pred_cov[static_cast<std::size_t>(i)](k, k);
      const double sigma = std::max(std::sqrt(std::max(var, 0.0)), 1e-12);
      acc += crps_gaussian(pred_mean(i, k), sigma, truth(i, k));
    }
    report.crps(k) = acc / static_cast<double>(m);
  }
  report.mv_score = mv_log_score(pred_mean, pred_cov, truth,
                                 &report.per_point_scores,
                                 &report.skipped_points);
  return report;
}

}  // namespace dicm
