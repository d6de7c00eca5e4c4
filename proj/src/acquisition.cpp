#include "dicm/acquisition.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <limits>

#include "dicm/indep_gp.hpp"

namespace dicm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::uint64_t kRefStreamTag = 0x7265666c6174656eULL;
constexpr std::uint64_t kSelectStreamTag = 0x73656c6563746f72ULL;

double ipow(double x, Index p) {
  double out = 1.0;
  for (Index i = 0; i < p; ++i) out *= x;
  return out;
}

std::uint64_t row_hash(const Eigen::Ref<const Eigen::RowVectorXd>& row) {
  std::uint64_t h = 0x8a5cd789635d2dffULL;
  for (Index j = 0; j < row.size(); ++j) {
    h = splitmix64(h ^ std::bit_cast<std::uint64_t>(row(j)));
  }
  return h;
}

// Latent draw for a single row, matching sample_latent's per-row draw order.
Eigen::RowVectorXd sample_latent_row(const Eigen::RowVectorXd& mean, double cv,
                                     const SpdFactor& b_factor, Rng& rng) {
  Vec z(mean.size());
  for (Index j = 0; j < z.size(); ++j) z(j) = rng.normal();
  const double scale = std::sqrt(std::max(cv, 0.0));
  return mean + scale * (b_factor.lower * z).transpose();
}

// Per-sample latent images of a point set. Candidates use streams keyed by
// their coordinates so identical candidates receive identical draws.
Mat latent_images(const Mat& unit_points, const ChainSample& sample,
                  const Chain& chain, const Dataset& train,
                  AcquisitionConfig::LatentMap mapping, std::uint64_t seed,
                  Index sample_index, bool per_point_streams) {
  if (chain.shallow()) return unit_points;
  const LayerPredictive lat =
      latent_conditional(unit_points, sample, train, chain.config.jitter);
  if (mapping == AcquisitionConfig::LatentMap::mean) return lat.mean;
  const SpdFactor bf = spd_factorize(lat.coreg.b_hat, 1e-12);
  const std::uint64_t stream_base =
      derive_stream(seed, static_cast<std::uint64_t>(sample_index));
  if (!per_point_streams) {
    Rng rng(splitmix64(stream_base ^ kRefStreamTag));
    Mat out(unit_points.rows(), lat.mean.cols());
    for (Index i = 0; i < unit_points.rows(); ++i) {
      out.row(i) = sample_latent_row(lat.mean.row(i), lat.cond_var(i), bf, rng);
    }
    return out;
  }
  Mat out(unit_points.rows(), lat.mean.cols());
  for (Index i = 0; i < unit_points.rows(); ++i) {
    Rng rng(splitmix64(stream_base ^ row_hash(unit_points.row(i))));
    out.row(i) = sample_latent_row(lat.mean.row(i), lat.cond_var(i), bf, rng);
  }
  return out;
}

}  // namespace

ConditioningBase::ConditioningBase(Mat design_in, double theta_in,
                                   double jitter_in)
    : design(std::move(design_in)), theta(theta_in), jitter(jitter_in),
      factor(factorize_kernel(design, theta, jitter)) {}

Vec ConditioningBase::kernel_row(const Vec& point) const {
  return cross_kernel(point.transpose(), design, theta).row(0).transpose();
}

double ConditioningBase::quadform(const Vec& point) const {
  return inv_quad(factor, kernel_row(point));
}

namespace {

// Candidate-side products for the rank-one update, shared across reference
// points.
struct CandidateAugment {
  Vec c;           // k(design, w_new)
  Vec g;           // K^{-1} c
  double v = 0.0;  // (1 + jitter) - c^T g
  bool direct = false;
  SpdFactor aug_factor;  // only when direct
  Mat aug_design;
};

CandidateAugment make_candidate_augment(const Vec& w_new,
                                        const ConditioningBase& base,
                                        bool use_fast) {
  CandidateAugment ca;
  ca.c = base.kernel_row(w_new);
  ca.g = solve_spd(base.factor, ca.c);
  ca.v = (1.0 + base.jitter) - ca.c.dot(ca.g);
  if (!use_fast || ca.v <= 10.0 * base.jitter) {
    ca.direct = true;
    ca.aug_design.resize(base.design.rows() + 1, base.design.cols());
    ca.aug_design << base.design, w_new.transpose();
    ca.aug_factor = factorize_kernel(ca.aug_design, base.theta, base.jitter);
  }
  return ca;
}

double augmented_quadform(const CandidateAugment& ca, const Vec& a_ref,
                          double q0_ref, double z) {
  if (ca.direct) {
    Vec k_aug(a_ref.size() + 1);
    k_aug << a_ref, z;
    return inv_quad(ca.aug_factor, k_aug);
  }
  const double ah = -a_ref.dot(ca.g) / ca.v;
  return q0_ref + ca.v * ah * ah + 2.0 * z * ah + z * z / ca.v;
}

}  // namespace

double fast_variance_update(const Vec& w_ref, const Vec& w_new,
                            const ConditioningBase& base) {
  const CandidateAugment ca = make_candidate_augment(w_new, base, true);
  const Vec a_ref = base.kernel_row(w_ref);
  const double q0 = inv_quad(base.factor, a_ref);
  const double z = std::exp(-(w_new - w_ref).squaredNorm() / base.theta);
  return augmented_quadform(ca, a_ref, q0, z);
}

namespace {

// Shared scoring core, in unit coordinates. excluded[i] marks candidates
// skipped up front; failed candidates are scored +inf.
Vec alc_scores_unit(const Chain& chain, const Mat& cand_unit,
                    const Mat& ref_unit, const Dataset& train,
                    const AcquisitionConfig& config, std::uint64_t seed,
                    const std::vector<bool>& excluded) {
  const Index c = cand_unit.rows();
  const Index r = ref_unit.rows();
  const Index q_out = train.q();
  const double jitter = chain.config.jitter;
  Vec scores = Vec::Zero(c);
  std::vector<bool> bad(static_cast<std::size_t>(c), false);

  for (Index t = 0; t < chain.size(); ++t) {
    const ChainSample& s = chain.samples[static_cast<std::size_t>(t)];
    const Mat w_ref = latent_images(ref_unit, s, chain, train,
                                    config.latent_mapping, seed, t, false);
    const Mat w_cand = latent_images(cand_unit, s, chain, train,
                                     config.latent_mapping, seed, t, true);
    const ConditioningBase base(s.w, s.theta_y, jitter);

    // Reference-side products, shared by every candidate.
    const Mat a = cross_kernel(w_ref, base.design, base.theta);  // r x n
    const Mat g_ref = solve_spd(base.factor, Mat(a.transpose()));
    Vec q0(r);
    for (Index j = 0; j < r; ++j) q0(j) = a.row(j).dot(g_ref.col(j));
    const Mat z_all = cross_kernel(w_cand, w_ref, base.theta);  // c x r

    for (Index i = 0; i < c; ++i) {
      if (excluded[static_cast<std::size_t>(i)] ||
          bad[static_cast<std::size_t>(i)]) {
        continue;
      }
      CandidateAugment ca;
      try {
        ca = make_candidate_augment(w_cand.row(i).transpose(), base,
                                    config.use_fast_update);
      } catch (const FactorizationError&) {
        bad[static_cast<std::size_t>(i)] = true;
        continue;
      }
      double acc = 0.0;
      for (Index j = 0; j < r; ++j) {
        const double quad =
            augmented_quadform(ca, a.row(j).transpose(), q0(j), z_all(i, j));
        const double resid = std::clamp(1.0 - quad, 0.0, 1.0 + jitter);
        acc += ipow(resid, q_out);
      }
      scores(i) += acc;
    }
  }

  const double norm =
      static_cast<double>(chain.size()) * static_cast<double>(r);
  for (Index i = 0; i < c; ++i) {
    if (excluded[static_cast<std::size_t>(i)] ||
        bad[static_cast<std::size_t>(i)]) {
      scores(i) = kInf;
    } else {
      scores(i) /= norm;
    }
  }
  return scores;
}

std::vector<bool> duplicate_filter(const Mat& cand_unit, const Mat& design_unit,
                                   double tol) {
  std::vector<bool> excluded(static_cast<std::size_t>(cand_unit.rows()), false);
  for (Index i = 0; i < cand_unit.rows(); ++i) {
    for (Index k = 0; k < design_unit.rows(); ++k) {
      if ((cand_unit.row(i) - design_unit.row(k)).norm() < tol) {
        excluded[static_cast<std::size_t>(i)] = true;
        break;
      }
    }
  }
  return excluded;
}

}  // namespace

double alc_score(const Vec& candidate_natural, const Chain& chain,
                 const AcquisitionConfig& config, const Dataset& train,
                 std::uint64_t seed) {
  if (chain.size() == 0) throw DomainError("alc_score: empty chain");
  const Mat cand_unit = train.scale_x(candidate_natural.transpose());
  const Mat ref_unit = train.scale_x(config.reference);
  const std::vector<bool> excluded(1, false);
  return alc_scores_unit(chain, cand_unit, ref_unit, train, config, seed,
                         excluded)(0);
}

AcquisitionResult select_next(const Chain& chain,
                              const AcquisitionConfig& config,
                              const Dataset& train, std::uint64_t seed) {
  if (chain.size() == 0) throw DomainError("select_next: empty chain");
  if (config.candidates.rows() < 1 || config.reference.rows() < 1) {
    throw DomainError("select_next: need at least one candidate and one "
                      "reference point");
  }
  const Mat cand_unit = train.scale_x(config.candidates);
  const Mat ref_unit = train.scale_x(config.reference);
  const std::vector<bool> excluded =
      duplicate_filter(cand_unit, train.x_unit, config.duplicate_tol);

  AcquisitionResult result;
  result.scores = alc_scores_unit(chain, cand_unit, ref_unit, train, config,
                                  seed, excluded);
  Index best = -1;
  for (Index i = 0; i < result.scores.size(); ++i) {
    if (std::isfinite(result.scores(i)) &&
        (best < 0 || result.scores(i) < result.scores(best))) {
      best = i;
    }
  }
  if (best < 0) {
    throw EmptyCandidatesError(
        "select_next: every candidate was excluded or failed");
  }
  result.selected_index = best;
  result.selected_point = config.candidates.row(best).transpose();
  return result;
}

double reference_variance(const Chain& chain, const Mat& reference_natural,
                          const Dataset& train,
                          const AcquisitionConfig& config,
                          std::uint64_t seed) {
  if (chain.size() == 0) throw DomainError("reference_variance: empty chain");
  const Mat ref_unit = train.scale_x(reference_natural);
  const Index r = ref_unit.rows();
  const Index q_out = train.q();
  double acc = 0.0;
  for (Index t = 0; t < chain.size(); ++t) {
    const ChainSample& s = chain.samples[static_cast<std::size_t>(t)];
    const Mat w_ref = latent_images(ref_unit, s, chain, train,
                                    config.latent_mapping, seed, t, false);
    const ConditioningBase base(s.w, s.theta_y, chain.config.jitter);
    for (Index j = 0; j < r; ++j) {
      const double q0 = base.quadform(w_ref.row(j).transpose());
      const double resid =
          std::clamp(1.0 - q0, 0.0, 1.0 + chain.config.jitter);
      acc += ipow(resid, q_out);
    }
  }
  return acc / (static_cast<double>(chain.size()) * static_cast<double>(r));
}

DesignResult design_loop(
    const Simulator& simulator, Index steps, Dataset data,
    const SamplerConfig& sampler_config, int layers, Index latent_dim,
    const AcquisitionConfig& acq_config, DesignMode mode, std::uint64_t seed,
    const Mat* test_x, const Mat* test_y,
    const std::function<void(const DesignStep&, const Dataset&)>& on_step) {
  if (steps < 0) throw DomainError("design_loop: negative step count");
  DesignResult result;
  result.final_ref_variance = std::numeric_limits<double>::quiet_NaN();
  if (steps == 0) {
    result.data = std::move(data);
    return result;
  }

  for (Index step = 1; step <= steps; ++step) {
    const auto t0 = std::chrono::steady_clock::now();
    SamplerConfig cfg = sampler_config;
    cfg.seed = derive_stream(seed, static_cast<std::uint64_t>(step - 1));

    DesignStep log;
    log.step = step;

    if (mode == DesignMode::indep_alc) {
      const IndepGpModel model = fit_indep(data, cfg);
      const AcquisitionResult sel =
          alc_indep(model, acq_config.candidates, acq_config.reference,
                    acq_config.duplicate_tol);
      log.x_selected = sel.selected_point;
      log.score = sel.scores(sel.selected_index);
      log.ref_variance = indep_reference_variance(model, acq_config.reference);
    } else {
      const Chain chain = run_chain(data, cfg, layers, latent_dim);
      log.ref_variance = reference_variance(chain, acq_config.reference, data,
                                            acq_config, cfg.seed);
      if (test_x != nullptr && test_y != nullptr) {
        const Prediction pred =
            predict(chain, *test_x, data, derive_stream(cfg.seed, 1));
        log.metrics = evaluate_metrics(pred.mean, pred.cov, *test_y);
      }
      if (mode == DesignMode::alc) {
        const AcquisitionResult sel =
            select_next(chain, acq_config, data, cfg.seed);
        log.x_selected = sel.selected_point;
        log.score = sel.scores(sel.selected_index);
      } else {
        // Uniform draw among candidates that are not design-row duplicates.
        const Mat cand_unit = data.scale_x(acq_config.candidates);
        const std::vector<bool> excluded = duplicate_filter(
            cand_unit, data.x_unit, acq_config.duplicate_tol);
        std::vector<Index> pool;
        for (Index i = 0; i < acq_config.candidates.rows(); ++i) {
          if (!excluded[static_cast<std::size_t>(i)]) pool.push_back(i);
        }
        if (pool.empty()) {
          throw EmptyCandidatesError("design_loop: no candidates left");
        }
        Rng rng(splitmix64(derive_stream(seed, static_cast<std::uint64_t>(
                                                   step - 1)) ^
                           kSelectStreamTag));
        const Index pick = pool[static_cast<std::size_t>(
            rng.uniform_below(static_cast<std::uint64_t>(pool.size())))];
        log.x_selected = acq_config.candidates.row(pick).transpose();
        log.score = std::numeric_limits<double>::quiet_NaN();
      }
    }

    const Mat x_new = log.x_selected.transpose();
    const Mat y_new = simulator(x_new);
    if (y_new.rows() != 1 || y_new.cols() != data.q()) {
      throw ShapeError("design_loop: simulator returned wrong shape");
    }
    data = data.appended(x_new, y_new);

    log.seconds = std::chrono::duration<double>(
                      std::chrono::steady_clock::now() - t0)
                      .count();
    result.steps.push_back(log);
    if (on_step) on_step(result.steps.back(), data);
  }

  // Final fit on the grown design for the closing diagnostic.
  SamplerConfig cfg = sampler_config;
  cfg.seed = derive_stream(seed, static_cast<std::uint64_t>(steps));
  if (mode == DesignMode::indep_alc) {
    const IndepGpModel model = fit_indep(data, cfg);
    result.final_ref_variance =
        indep_reference_variance(model, acq_config.reference);
  } else {
    const Chain chain = run_chain(data, cfg, layers, latent_dim);
    result.final_ref_variance = reference_variance(
        chain, acq_config.reference, data, acq_config, cfg.seed);
  }
  result.data = std::move(data);
  return result;
}

}  // namespace dicm
