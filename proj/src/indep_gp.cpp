#include "dicm/indep_gp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace dicm {

IndepGpModel fit_indep(const Dataset& data, const SamplerConfig& config,
                       const PriorSpec& priors) {
  config.validate();
  priors.validate();
  if (data.n() < 2) throw DomainError("fit_indep: need n >= 2");

  const Mat dist2 = pairwise_sqdist(data.x_unit);
  IndepGpModel model;
  model.train = data;
  model.jitter = config.jitter;
  model.thetas.resize(data.q());

  const double theta_min = 1e-6;
  const double theta_max = 2.0 * max_pairwise_sqdist(data.x_unit);
  for (Index q = 0; q < data.q(); ++q) {
    const Mat y_col = data.y_std.col(q);
    // Same restarted stream for every output: identical columns yield
    // identical lengthscales.
    Rng rng(derive_stream(config.seed, 0x696e646570ULL));
    double theta = median_pairwise_sqdist(data.x_unit);
    SpdFactor kf = factorize_kernel_sqdist(dist2, theta, config.jitter);
    double ll = log_marginal(y_col, kf);

    double theta_sum = 0.0;
    Index kept = 0;
    for (Index t = 2; t <= config.iterations; ++t) {
      SpdFactor kf_star;
      double ll_star = 0.0;
      const auto lik = [&](double th) {
        if (th == theta) return ll;
        kf_star = factorize_kernel_sqdist(dist2, th, config.jitter);
        ll_star = log_marginal(y_col, kf_star);
        return ll_star;
      };
      const auto prior = [&](double th) {
        if (th < theta_min || th > theta_max) {
          return -std::numeric_limits<double>::infinity();
        }
        return log_gamma_prior(th, priors.shape, priors.rate_theta_y);
      };
      const MhResult r = mh_update_lengthscale(
          theta, config.proposal_l, config.proposal_u, lik, prior, rng);
      if (r.accepted && r.theta != theta) {
        theta = r.theta;
        kf = std::move(kf_star);
        ll = ll_star;
      }
      if (t > config.burn_in && (t - config.burn_in) % config.thinning == 0) {
        theta_sum += theta;
        ++kept;
      }
    }
    model.thetas(q) = theta_sum / static_cast<double>(kept);
  }
  return model;
}

Mat indep_predict_mean(const IndepGpModel& model, const Mat& x_star_natural) {
  const Dataset& train = model.train;
  const Mat x_unit = train.scale_x(x_star_natural);
  Mat mean_std(x_unit.rows(), train.q());
  for (Index q = 0; q < train.q(); ++q) {
    const SpdFactor kf =
        factorize_kernel(train.x_unit, model.thetas(q), model.jitter);
    const Mat kx = cross_kernel(x_unit, train.x_unit, model.thetas(q));
    mean_std.col(q) = kx * solve_spd(kf, Vec(train.y_std.col(q)));
  }
  return train.destandardize_y(mean_std);
}

namespace {

std::vector<ConditioningBase> per_output_bases(const IndepGpModel& model) {
  std::vector<ConditioningBase> bases;
  bases.reserve(static_cast<std::size_t>(model.train.q()));
  for (Index q = 0; q < model.train.q(); ++q) {
    bases.emplace_back(model.train.x_unit, model.thetas(q), model.jitter);
  }
  return bases;
}

}  // namespace

AcquisitionResult alc_indep(const IndepGpModel& model,
                            const Mat& candidates_natural,
                            const Mat& reference_natural,
                            double duplicate_tol) {
  const Dataset& train = model.train;
  if (candidates_natural.rows() < 1 || reference_natural.rows() < 1) {
    throw DomainError("alc_indep: need candidates and reference points");
  }
  const Mat cand_unit = train.scale_x(candidates_natural);
  const Mat ref_unit = train.scale_x(reference_natural);
  const Index c = cand_unit.rows();
  const Index r = ref_unit.rows();
  const auto bases = per_output_bases(model);

  AcquisitionResult result;
  result.scores = Vec::Constant(c, std::numeric_limits<double>::infinity());
  for (Index i = 0; i < c; ++i) {
    bool duplicate = false;
    for (Index k = 0; k < train.x_unit.rows(); ++k) {
      if ((cand_unit.row(i) - train.x_unit.row(k)).norm() < duplicate_tol) {
        duplicate = true;
        break;
      }
    }
    if (duplicate) continue;

    double acc = 0.0;
    bool failed = false;
    for (Index j = 0; j < r && !failed; ++j) {
      double prod = 1.0;
      for (const auto& base : bases) {
        double quad;
        try {
          quad = fast_variance_update(ref_unit.row(j).transpose(),
                                      cand_unit.row(i).transpose(), base);
        } catch (const FactorizationError&) {
          failed = true;
          break;
        }
        prod *= std::clamp(1.0 - quad, 0.0, 1.0 + model.jitter);
      }
      acc += prod;
    }
    if (!failed) result.scores(i) = acc / static_cast<double>(r);
  }

  Index best = -1;
  for (Index i = 0; i < c; ++i) {
    if (std::isfinite(result.scores(i)) &&
        (best < 0 || result.scores(i) < result.scores(best))) {
      best = i;
    }
  }
  if (best < 0) {
    throw EmptyCandidatesError("alc_indep: every candidate was excluded");
  }
  result.selected_index = best;
  result.selected_point = candidates_natural.row(best).transpose();
  return result;
}

double indep_reference_variance(const IndepGpModel& model,
                                const Mat& reference_natural) {
  const Mat ref_unit = model.train.scale_x(reference_natural);
  const auto bases = per_output_bases(model);
  double acc = 0.0;
  for (Index j = 0; j < ref_unit.rows(); ++j) {
    double prod = 1.0;
    for (const auto& base : bases) {
      const double quad = base.quadform(ref_unit.row(j).transpose());
      prod *= std::clamp(1.0 - quad, 0.0, 1.0 + model.jitter);
    }
    acc += prod;
  }
  return acc / static_cast<double>(ref_unit.rows());
}

}  // namespace dicm
