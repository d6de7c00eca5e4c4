#include "dicm/predictor.hpp"

#include <algorithm>
#include <cmath>

#include "dicm/metrics.hpp"

namespace dicm {

namespace {

LayerPredictive conditional(const Mat& points, const Mat& design,
                            const Mat& values, double theta, double jitter,
                            CoregEstimate coreg) {
  if (points.cols() != design.cols()) {
    throw ShapeError("conditional: point dimension does not match design");
  }
  const SpdFactor kf = factorize_kernel(design, theta, jitter);
  const Mat kx = cross_kernel(points, design, theta);  // m x n
  const Mat kinv_vals = solve_spd(kf, values);         // n x S
  LayerPredictive out;
  out.mean = kx * kinv_vals;
  out.cond_var.resize(points.rows());
  const Mat kinv_kx = solve_spd(kf, Mat(kx.transpose()));  // n x m
  for (Index i = 0; i < points.rows(); ++i) {
    const double quad = kx.row(i).dot(kinv_kx.col(i));
    out.cond_var(i) = std::clamp(1.0 - quad, 0.0, 1.0 + jitter);
  }
  out.coreg = std::move(coreg);
  return out;
}

}  // namespace

LayerPredictive latent_conditional(const Mat& x_star_unit,
                                   const ChainSample& sample,
                                   const Dataset& train, double jitter) {
  if (sample.theta_w <= 0.0) {
    throw DomainError(
        "latent_conditional: sample comes from a single-layer chain");
  }
  return conditional(x_star_unit, train.x_unit, sample.w, sample.theta_w,
                     jitter, sample.b_hat_w);
}

LayerPredictive output_conditional(const Mat& w_star,
                                   const ChainSample& sample,
                                   const Dataset& train, double jitter) {
  return conditional(w_star, sample.w, train.y_std, sample.theta_y, jitter,
                     sample.b_hat_y);
}

Mat sample_latent(const LayerPredictive& pred, Rng& rng, Index student_t_dof) {
  const Index m = pred.mean.rows();
  const Index s = pred.mean.cols();
  if (pred.coreg.width() != s) {
    throw ShapeError("sample_latent: coregionalization width mismatch");
  }
  const SpdFactor bf = spd_factorize(pred.coreg.b_hat, 1e-12);
  Mat out(m, s);
  Vec z(s);
  for (Index i = 0; i < m; ++i) {
    for (Index j = 0; j < s; ++j) z(j) = rng.normal();
    double scale = std::sqrt(std::max(pred.cond_var(i), 0.0));
    if (student_t_dof > 0) {
      double chi2 = 0.0;
      for (Index k = 0; k < student_t_dof; ++k) {
        const double g = rng.normal();
        chi2 += g * g;
      }
      scale *= std::sqrt(static_cast<double>(student_t_dof) / chi2);
    }
    out.row(i) = pred.mean.row(i) + scale * (bf.lower * z).transpose();
  }
  return out;
}

Prediction predict(const Chain& chain, const Mat& x_star_natural,
                   const Dataset& train, std::uint64_t seed,
                   const PredictConfig& cfg) {
  if (chain.size() == 0) throw DomainError("predict: empty chain");
  if (x_star_natural.cols() != train.d()) {
    throw ShapeError("predict: test dimension does not match training data");
  }
  const Index m = x_star_natural.rows();
  const Index q = train.q();
  const double jitter = chain.config.jitter;
  const Mat x_unit = train.scale_x(x_star_natural);
  const Index t_count = chain.size();

  Mat sum_mu = Mat::Zero(m, q);
  std::vector<Mat> sum_mumu(static_cast<std::size_t>(m), Mat::Zero(q, q));
  std::vector<Mat> sum_cv(static_cast<std::size_t>(m), Mat::Zero(q, q));

  for (Index t = 0; t < t_count; ++t) {
    const ChainSample& s = chain.samples[static_cast<std::size_t>(t)];
    Rng rng(derive_stream(seed, static_cast<std::uint64_t>(t)));
    Mat w_star;
    if (chain.shallow()) {
      w_star = x_unit;
    } else {
      const LayerPredictive lat = latent_conditional(x_unit, s, train, jitter);
      if (cfg.sample_latent_layer) {
        w_star = sample_latent(lat, rng,
                               cfg.student_t_latent ? train.n() : Index{0});
      } else {
        w_star = lat.mean;
      }
    }
    const LayerPredictive out = output_conditional(w_star, s, train, jitter);
    for (Index i = 0; i < m; ++i) {
      const Vec mu = out.mean.row(i).transpose();
      sum_mu.row(i) += mu.transpose();
      sum_mumu[static_cast<std::size_t>(i)] += mu * mu.transpose();
      sum_cv[static_cast<std::size_t>(i)] += out.cond_var(i) * out.coreg.b_hat;
    }
  }

  const double tn = static_cast<double>(t_count);
  Prediction pred;
  pred.sample_count = t_count;
  pred.mean.resize(m, q);
  pred.cov.resize(static_cast<std::size_t>(m));
  for (Index i = 0; i < m; ++i) {
    const Vec mu_bar = sum_mu.row(i).transpose() / tn;
    Mat cov = sum_cv[static_cast<std::size_t>(i)] / tn +
              sum_mumu[static_cast<std::size_t>(i)] / tn -
              mu_bar * mu_bar.transpose();
    cov = psd_clip(cov);
    // De-scale: mean and covariance back to natural output units.
    pred.mean.row(i) =
        train.destandardize_y(mu_bar.transpose()).row(0);
    const Mat scale = train.y_scale.asDiagonal();
    pred.cov[static_cast<std::size_t>(i)] = scale * cov * scale;
  }
  return pred;
}

}  // namespace dicm
