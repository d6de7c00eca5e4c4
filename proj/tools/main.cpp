// Command-line front end: fit / predict / design / bench.
//
// Exit codes: 0 success, 2 usage error, 3 data error, 4 numerical failure.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "dicm/acquisition.hpp"
#include "dicm/benchfns.hpp"
#include "dicm/chain_io.hpp"
#include "dicm/csv.hpp"
#include "dicm/dataset.hpp"
#include "dicm/doe.hpp"
#include "dicm/indep_gp.hpp"
#include "dicm/metrics.hpp"
#include "dicm/predictor.hpp"
#include "dicm/sampler.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace dicm;

namespace {

struct CommonOpts {
  Index iters = 5000;
  Index burnin = 1000;
  Index thin = 2;
  int layers = 2;
  Index latent_dim = 0;
  double jitter = kDefaultJitter;
  std::uint64_t seed = 0;
  bool timing = true;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--iters", o.iters, "MCMC iterations");
  cmd->add_option("--burnin", o.burnin, "burn-in iterations");
  cmd->add_option("--thin", o.thin, "thinning interval");
  cmd->add_option("--layers", o.layers, "model layers (1 or 2)")
      ->check(CLI::IsMember({1, 2}));
  cmd->add_option("--latent-dim", o.latent_dim,
                  "latent width D (0 = max(d, Q))");
  cmd->add_option("--jitter", o.jitter, "kernel diagonal jitter");
  cmd->add_option("--seed", o.seed, "random seed");
  cmd->add_flag("--no-timing", [&o](std::int64_t) { o.timing = false; },
                "report wall-clock fields as 0 for byte-stable artifacts");
}

SamplerConfig make_sampler_config(const CommonOpts& o) {
  SamplerConfig cfg;
  cfg.iterations = o.iters;
  cfg.burn_in = o.burnin;
  cfg.thinning = o.thin;
  cfg.seed = o.seed;
  cfg.jitter = o.jitter;
  return cfg;
}

Vec to_vec(const std::vector<double>& v) {
  Vec out(static_cast<Index>(v.size()));
  for (Index i = 0; i < out.size(); ++i) {
    out(i) = v[static_cast<std::size_t>(i)];
  }
  return out;
}

std::vector<std::string> numbered(const char* stem, Index count) {
  std::vector<std::string> h;
  for (Index j = 0; j < count; ++j) {
    h.push_back(std::string(stem) + std::to_string(j + 1));
  }
  return h;
}

Dataset load_dataset(const std::string& x_path, const std::string& y_path,
                     const std::vector<double>& bounds) {
  const CsvTable xt = read_csv(x_path);
  const CsvTable yt = read_csv(y_path);
  if (bounds.empty()) {
    return Dataset::from_data(xt.values, yt.values);
  }
  const Index d = xt.values.cols();
  if (static_cast<Index>(bounds.size()) != 2 * d) {
    throw DataError("--bounds needs 2*d values: l1,u1,l2,u2,...");
  }
  Vec lo(d);
  Vec hi(d);
  for (Index j = 0; j < d; ++j) {
    lo(j) = bounds[static_cast<std::size_t>(2 * j)];
    hi(j) = bounds[static_cast<std::size_t>(2 * j + 1)];
  }
  return Dataset::from_data_with_bounds(xt.values, yt.values, lo, hi);
}

json metrics_json(const MetricReport& report, double seconds,
                  std::uint64_t seed) {
  json j;
  for (Index q = 0; q < report.rmse.size(); ++q) {
    j["rmse_" + std::to_string(q + 1)] = report.rmse(q);
  }
  for (Index q = 0; q < report.crps.size(); ++q) {
    j["crps_" + std::to_string(q + 1)] = report.crps(q);
  }
  j["mv_score"] = report.mv_score;
  j["seconds"] = seconds;
  j["seed"] = seed;
  return j;
}

std::vector<std::string> prediction_header(Index q) {
  std::vector<std::string> h = numbered("mean_", q);
  for (const auto& v : numbered("var_", q)) h.push_back(v);
  for (Index a = 0; a < q; ++a) {
    for (Index b = a + 1; b < q; ++b) {
      h.push_back("cov_" + std::to_string(a + 1) + std::to_string(b + 1));
    }
  }
  return h;
}

Mat prediction_table(const Prediction& pred) {
  const Index m = pred.mean.rows();
  const Index q = pred.mean.cols();
  const Index cov_cols = q * (q - 1) / 2;
  Mat out(m, 2 * q + cov_cols);
  for (Index i = 0; i < m; ++i) {
    const Mat& c = pred.cov[static_cast<std::size_t>(i)];
    for (Index k = 0; k < q; ++k) out(i, k) = pred.mean(i, k);
    for (Index k = 0; k < q; ++k) out(i, q + k) = c(k, k);
    Index col = 2 * q;
    for (Index a = 0; a < q; ++a) {
      for (Index b = a + 1; b < q; ++b) out(i, col++) = c(a, b);
    }
  }
  return out;
}

// ---------------------------------------------------------------- fit ----

struct FitArgs {
  CommonOpts common;
  std::string x_path, y_path, out_dir;
  std::vector<double> bounds;
};

int run_fit(const FitArgs& a) {
  const Dataset data = load_dataset(a.x_path, a.y_path, a.bounds);
  const Chain chain = run_chain(data, make_sampler_config(a.common),
                                a.common.layers, a.common.latent_dim);
  save_chain(chain, data, a.out_dir);
  std::cout << "samples " << chain.size() << "\n";
  if (!chain.shallow()) {
    std::cout << "accept_theta_w " << chain.diagnostics.accept_theta_w << "\n";
  }
  std::cout << "accept_theta_y " << chain.diagnostics.accept_theta_y << "\n"
            << "mean_ess_shrinks " << chain.diagnostics.mean_ess_shrinks
            << "\n"
            << "likelihood_failures " << chain.diagnostics.likelihood_failures
            << "\n";
  return 0;
}

// ------------------------------------------------------------ predict ----

struct PredictArgs {
  std::string chain_dir, test_path, out_path, truth_path, metrics_path;
  std::uint64_t seed = 0;
  std::string latent = "sample";
  bool student_t = false;
  bool timing = true;
};

int run_predict(const PredictArgs& a) {
  const auto t0 = std::chrono::steady_clock::now();
  const ChainBundle bundle = load_chain(a.chain_dir);
  const CsvTable test = read_csv(a.test_path);
  if (test.values.cols() != bundle.train.d()) {
    throw ShapeError("test CSV has " + std::to_string(test.values.cols()) +
                     " columns but the chain was fit with d = " +
                     std::to_string(bundle.train.d()));
  }
  PredictConfig cfg;
  cfg.sample_latent_layer = (a.latent == "sample");
  cfg.student_t_latent = a.student_t;
  const Prediction pred =
      predict(bundle.chain, test.values, bundle.train, a.seed, cfg);
  write_csv(a.out_path, prediction_header(bundle.train.q()),
            prediction_table(pred));

  if (!a.truth_path.empty()) {
    const CsvTable truth = read_csv(a.truth_path);
    const MetricReport report =
        evaluate_metrics(pred.mean, pred.cov, truth.values);
    const double seconds =
        a.timing ? std::chrono::duration<double>(
                       std::chrono::steady_clock::now() - t0)
                       .count()
                 : 0.0;
    const std::string path = a.metrics_path.empty()
                                 ? a.out_path + ".metrics.json"
                                 : a.metrics_path;
    std::ofstream out(path);
    if (!out) throw DataError("cannot write '" + path + "'");
    out << metrics_json(report, seconds, a.seed).dump() << "\n";
  }
  return 0;
}

// ------------------------------------------------------------- design ----

struct DesignArgs {
  CommonOpts common;
  std::string x_path, y_path, fn, out_dir;
  std::vector<double> bounds;
  Index n0 = 30;
  Index steps = 10;
  Index grid = 20;
  std::string acq = "alc";
  std::string model = "deep";
  bool suggest_only = false;
  std::string test_x_path, test_y_path;
  Index lhd_iters = 10000;
};

void write_steps_csv(const fs::path& path, const std::vector<DesignStep>& steps,
                     Index d, Index q, bool with_metrics, bool timing) {
  std::vector<std::string> header = {"step"};
  for (const auto& n : numbered("x", d)) header.push_back(n);
  header.push_back("score");
  header.push_back("ref_variance");
  header.push_back("seconds");
  if (with_metrics) {
    for (const auto& n : numbered("rmse_", q)) header.push_back(n);
    for (const auto& n : numbered("crps_", q)) header.push_back(n);
    header.push_back("mv_score");
  }
  Mat table(static_cast<Index>(steps.size()), static_cast<Index>(header.size()));
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const DesignStep& s = steps[i];
    Index col = 0;
    table(static_cast<Index>(i), col++) = static_cast<double>(s.step);
    for (Index j = 0; j < d; ++j) {
      table(static_cast<Index>(i), col++) = s.x_selected(j);
    }
    table(static_cast<Index>(i), col++) = s.score;
    table(static_cast<Index>(i), col++) = s.ref_variance;
    table(static_cast<Index>(i), col++) = timing ? s.seconds : 0.0;
    if (with_metrics) {
      const MetricReport& r = *s.metrics;
      for (Index j = 0; j < q; ++j) table(static_cast<Index>(i), col++) = r.rmse(j);
      for (Index j = 0; j < q; ++j) table(static_cast<Index>(i), col++) = r.crps(j);
      table(static_cast<Index>(i), col++) = r.mv_score;
    }
  }
  write_csv(path, header, table);
}

int run_design(const DesignArgs& a) {
  const auto t0 = std::chrono::steady_clock::now();
  fs::create_directories(a.out_dir);
  const fs::path out_dir(a.out_dir);

  // Assemble the initial dataset and the natural-domain bounds.
  std::optional<Dataset> data;
  Vec lower, upper;
  if (!a.fn.empty()) {
    const BenchSpec& spec = bench_spec(a.fn);
    lower = spec.lower;
    upper = spec.upper;
  }
  if (!a.bounds.empty()) {
    const auto d = static_cast<Index>(a.bounds.size()) / 2;
    lower.resize(d);
    upper.resize(d);
    for (Index j = 0; j < d; ++j) {
      lower(j) = a.bounds[static_cast<std::size_t>(2 * j)];
      upper(j) = a.bounds[static_cast<std::size_t>(2 * j + 1)];
    }
  }
  if (!a.x_path.empty()) {
    const CsvTable xt = read_csv(a.x_path);
    const CsvTable yt = read_csv(a.y_path);
    if (lower.size() == 0) {
      data = Dataset::from_data(xt.values, yt.values);
      lower = data->x_lower;
      upper = data->x_upper;
    } else {
      data = Dataset::from_data_with_bounds(xt.values, yt.values, lower, upper);
    }
  } else {
    if (a.fn.empty()) {
      throw DataError("design needs either --x/--y or --fn");
    }
    const BenchSpec& spec = bench_spec(a.fn);
    const Design lhd = maximin_lhd(a.n0, spec.d, a.lhd_iters,
                                   derive_stream(a.common.seed, 777));
    const Mat x0 = rescale_design(lhd.points, lower, upper);
    data = Dataset::from_data_with_bounds(x0, bench_evaluate(a.fn, x0), lower,
                                          upper);
  }

  // Candidate and reference sets share one grid over the domain.
  AcquisitionConfig acq;
  const Mat grid_nat =
      rescale_design(grid_design(a.grid, data->d()).points, lower, upper);
  acq.candidates = grid_nat;
  acq.reference = grid_nat;

  const SamplerConfig sampler_cfg = make_sampler_config(a.common);

  if (a.suggest_only) {
    SamplerConfig cfg = sampler_cfg;
    cfg.seed = derive_stream(a.common.seed, 0);
    Vec next;
    if (a.model == "indep") {
      const IndepGpModel model = fit_indep(*data, cfg);
      next = alc_indep(model, acq.candidates, acq.reference).selected_point;
    } else {
      const Chain chain =
          run_chain(*data, cfg, a.common.layers, a.common.latent_dim);
      next = select_next(chain, acq, *data, cfg.seed).selected_point;
    }
    write_csv(out_dir / "next_point.csv", numbered("x", data->d()),
              next.transpose());
    return 0;
  }

  if (a.fn.empty()) {
    throw DataError("closed-loop design needs --fn (or use --suggest-only)");
  }
  const std::string fn = a.fn;
  const Simulator simulator = [fn](const Mat& x) {
    return bench_evaluate(fn, x);
  };

  std::optional<CsvTable> test_x, test_y;
  if (!a.test_x_path.empty()) {
    test_x = read_csv(a.test_x_path);
    test_y = read_csv(a.test_y_path);
  }
  const bool with_metrics = test_x.has_value();

  DesignMode mode = DesignMode::alc;
  if (a.model == "indep") {
    mode = DesignMode::indep_alc;
  } else if (a.acq == "random") {
    mode = DesignMode::random;
  }

  std::vector<DesignStep> steps_so_far;
  const auto on_step = [&](const DesignStep& step, const Dataset& current) {
    steps_so_far.push_back(step);
    write_csv(out_dir / "x.csv", numbered("x", current.d()), current.x);
    write_csv(out_dir / "y.csv", numbered("y", current.q()), current.y);
    write_steps_csv(out_dir / "steps.csv", steps_so_far, current.d(),
                    current.q(), with_metrics, a.common.timing);
  };

  const DesignResult result = design_loop(
      simulator, a.steps, *data, sampler_cfg, a.common.layers,
      a.common.latent_dim, acq, mode, a.common.seed,
      test_x ? &test_x->values : nullptr, test_y ? &test_y->values : nullptr,
      on_step);

  write_csv(out_dir / "x.csv", numbered("x", result.data.d()), result.data.x);
  write_csv(out_dir / "y.csv", numbered("y", result.data.q()), result.data.y);
  write_steps_csv(out_dir / "steps.csv", result.steps, result.data.d(),
                  result.data.q(), with_metrics, a.common.timing);

  json summary;
  summary["final_ref_variance"] = result.final_ref_variance;
  summary["n_final"] = result.data.n();
  summary["steps"] = static_cast<long long>(a.steps);
  summary["acq"] = (mode == DesignMode::random) ? "random" : "alc";
  summary["model"] = (mode == DesignMode::indep_alc) ? "indep" : "deep";
  summary["seconds_total"] =
      a.common.timing ? std::chrono::duration<double>(
                            std::chrono::steady_clock::now() - t0)
                            .count()
                      : 0.0;
  std::ofstream out(out_dir / "design_summary.json");
  out << summary.dump(2) << "\n";
  return 0;
}

// -------------------------------------------------------------- bench ----

struct BenchArgs {
  CommonOpts common;
  std::string fn, out_path;
  Index reps = 1;
  Index n_train = 0;  // 0 = benchmark default
  Index n_test = 0;
  Index lhd_iters = 10000;
};

int run_bench(const BenchArgs& a) {
  const BenchSpec& spec = bench_spec(a.fn);
  const Index n_train = a.n_train > 0 ? a.n_train : spec.default_n_train;
  const Index n_test = a.n_test > 0 ? a.n_test : spec.default_n_test;
  if (a.reps < 1) throw DomainError("bench: need reps >= 1");

  // Fixed test design shared by all repetitions.
  const Design test_design = maximin_lhd(
      n_test, spec.d, a.lhd_iters, derive_stream(a.common.seed, 0x7e57ULL));
  const Mat test_x = rescale_design(test_design.points, spec.lower, spec.upper);
  const Mat test_y = bench_evaluate(a.fn, test_x);

  std::ofstream out(a.out_path);
  if (!out) throw DataError("cannot write '" + a.out_path + "'");

  for (Index rep = 0; rep < a.reps; ++rep) {
    const auto t0 = std::chrono::steady_clock::now();
    const std::uint64_t rep_seed =
        derive_stream(a.common.seed, static_cast<std::uint64_t>(rep));
    const Design train_design = maximin_lhd(
        n_train, spec.d, a.lhd_iters, derive_stream(rep_seed, 1));
    const Mat train_x =
        rescale_design(train_design.points, spec.lower, spec.upper);
    const Dataset data = Dataset::from_data_with_bounds(
        train_x, bench_evaluate(a.fn, train_x), spec.lower, spec.upper);

    SamplerConfig cfg = make_sampler_config(a.common);
    cfg.seed = rep_seed;
    const Chain chain =
        run_chain(data, cfg, a.common.layers, a.common.latent_dim);
    const Prediction pred =
        predict(chain, test_x, data, derive_stream(rep_seed, 2));
    const MetricReport report = evaluate_metrics(pred.mean, pred.cov, test_y);
    const double seconds =
        a.common.timing ? std::chrono::duration<double>(
                              std::chrono::steady_clock::now() - t0)
                              .count()
                        : 0.0;
    out << metrics_json(report, seconds, rep_seed).dump() << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Deep ICM multi-output Gaussian-process surrogate"};
  app.require_subcommand(1);

  FitArgs fit_args;
  auto* fit_cmd = app.add_subcommand("fit", "fit a surrogate to CSV data");
  fit_cmd->add_option("--x", fit_args.x_path, "training inputs CSV")
      ->required();
  fit_cmd->add_option("--y", fit_args.y_path, "training outputs CSV")
      ->required();
  fit_cmd->add_option("--out", fit_args.out_dir, "output chain directory")
      ->required();
  fit_cmd->add_option("--bounds", fit_args.bounds,
                      "natural domain as l1,u1,l2,u2,...")
      ->delimiter(',');
  add_common(fit_cmd, fit_args.common);

  PredictArgs pred_args;
  auto* pred_cmd = app.add_subcommand("predict", "predict from a saved chain");
  pred_cmd->add_option("--chain", pred_args.chain_dir, "chain directory")
      ->required();
  pred_cmd->add_option("--test", pred_args.test_path, "test inputs CSV")
      ->required();
  pred_cmd->add_option("--out", pred_args.out_path, "prediction CSV")
      ->required();
  pred_cmd->add_option("--truth", pred_args.truth_path,
                       "true outputs CSV (enables metrics)");
  pred_cmd->add_option("--metrics", pred_args.metrics_path,
                       "metrics JSON path (default: <out>.metrics.json)");
  pred_cmd->add_option("--seed", pred_args.seed, "random seed");
  pred_cmd->add_option("--latent", pred_args.latent,
                       "latent propagation: sample or mean")
      ->check(CLI::IsMember({"sample", "mean"}));
  pred_cmd->add_flag("--student-t", pred_args.student_t,
                     "Student-t latent draws (n dof)");
  pred_cmd->add_flag("--no-timing",
                     [&pred_args](std::int64_t) { pred_args.timing = false; },
                     "report wall-clock fields as 0");

  DesignArgs design_args;
  auto* design_cmd =
      app.add_subcommand("design", "sequential design via multi-output ALC");
  design_cmd->add_option("--out", design_args.out_dir, "output directory")
      ->required();
  design_cmd->add_option("--x", design_args.x_path, "initial inputs CSV");
  design_cmd->add_option("--y", design_args.y_path, "initial outputs CSV");
  design_cmd->add_option("--fn", design_args.fn, "benchmark function name");
  design_cmd->add_option("--bounds", design_args.bounds,
                         "natural domain as l1,u1,l2,u2,...")
      ->delimiter(',');
  design_cmd->add_option("--n0", design_args.n0, "initial design size");
  design_cmd->add_option("--steps", design_args.steps, "acquisition steps");
  design_cmd->add_option("--grid", design_args.grid,
                         "grid points per dimension for candidates/reference");
  design_cmd->add_option("--acq", design_args.acq, "acquisition: alc or random")
      ->check(CLI::IsMember({"alc", "random"}));
  design_cmd->add_option("--model", design_args.model, "deep or indep")
      ->check(CLI::IsMember({"deep", "indep"}));
  design_cmd->add_flag("--suggest-only", design_args.suggest_only,
                       "fit once, emit next_point.csv and exit");
  design_cmd->add_option("--test-x", design_args.test_x_path,
                         "held-out test inputs CSV for per-step metrics");
  design_cmd->add_option("--test-y", design_args.test_y_path,
                         "held-out test outputs CSV");
  design_cmd->add_option("--lhd-iters", design_args.lhd_iters,
                         "maximin optimization proposals");
  add_common(design_cmd, design_args.common);

  BenchArgs bench_args;
  auto* bench_cmd =
      app.add_subcommand("bench", "repeated fit/predict/score on a benchmark");
  bench_cmd->add_option("--fn", bench_args.fn, "benchmark function name")
      ->required();
  bench_cmd->add_option("--out", bench_args.out_path, "JSON-lines output path")
      ->required();
  bench_cmd->add_option("--reps", bench_args.reps, "repetitions");
  bench_cmd->add_option("--n-train", bench_args.n_train,
                        "training size (default: benchmark table)");
  bench_cmd->add_option("--n-test", bench_args.n_test,
                        "test size (default: benchmark table)");
  bench_cmd->add_option("--lhd-iters", bench_args.lhd_iters,
                        "maximin optimization proposals");
  add_common(bench_cmd, bench_args.common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (fit_cmd->parsed()) return run_fit(fit_args);
    if (pred_cmd->parsed()) return run_predict(pred_args);
    if (design_cmd->parsed()) return run_design(design_args);
    if (bench_cmd->parsed()) return run_bench(bench_args);
  } catch (const FactorizationError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 4;
  } catch (const DegenerateLikelihoodError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 4;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "unexpected error: " << e.what() << "\n";
    return 4;
  }
  return 2;
}
