#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "dicm/benchfns.hpp"
#include "dicm/chain_io.hpp"
#include "dicm/csv.hpp"
#include "dicm/dataset.hpp"
#include "dicm/doe.hpp"
#include "dicm/predictor.hpp"

using namespace dicm;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const char* tag) {
  const fs::path p = fs::temp_directory_path() / (std::string("dicm_test_") + tag);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

Dataset forrester_data(Index n, std::uint64_t seed) {
  const Design lhd = maximin_lhd(n, 1, 2000, seed);
  Vec lo(1), hi(1);
  lo << 0.0;
  hi << 1.0;
  const Mat x = rescale_design(lhd.points, lo, hi);
  return Dataset::from_data_with_bounds(x, bench_evaluate("forrester", x), lo,
                                        hi);
}

}  // namespace

TEST_CASE("dataset scaling invariants") {
  Mat x(4, 2);
  x << 0.0, 1.0, 2.0, 3.0, 4.0, 2.0, 1.0, 0.5;
  Mat y(4, 1);
  y << 1.0, -2.0, 0.5, 3.0;
  const Dataset ds = Dataset::from_data(x, y);

  CHECK(ds.x_unit.minCoeff() >= 0.0);
  CHECK(ds.x_unit.maxCoeff() <= 1.0);
  CHECK(std::abs(ds.y_std.col(0).mean()) < 1e-12);
  CHECK(std::abs(ds.y_std.col(0).squaredNorm() / 4.0 - 1.0) < 1e-12);

  // Scale / de-scale round trip.
  const Mat back = ds.unscale_x(ds.x_unit);
  CHECK((back - ds.x).cwiseAbs().maxCoeff() < 1e-12);
  const Mat y_back = ds.destandardize_y(ds.y_std);
  CHECK((y_back - ds.y).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("dataset validation errors") {
  Mat x(3, 1), y(3, 1);
  x << 0.0, 0.5, 1.0;
  y << 1.0, 1.0, 1.0;  // constant output
  CHECK_THROWS_AS(Dataset::from_data(x, y), DataError);

  Mat y_ok(3, 1);
  y_ok << 1.0, 2.0, 3.0;
  Mat x_const(3, 1);
  x_const << 0.5, 0.5, 0.5;
  CHECK_THROWS_AS(Dataset::from_data(x_const, y_ok), DataError);

  Mat y_short(2, 1);
  y_short << 1.0, 2.0;
  CHECK_THROWS_AS(Dataset::from_data(x, y_short), DataError);

  Vec lo(1), hi(1);
  lo << 0.2;  // row 0 lies outside
  hi << 1.0;
  CHECK_THROWS_AS(Dataset::from_data_with_bounds(x, y_ok, lo, hi), DomainError);
}

TEST_CASE("dataset appended keeps bounds and rescales outputs") {
  Mat x(3, 1), y(3, 1);
  x << 0.1, 0.5, 0.9;
  y << 1.0, 2.0, 3.0;
  Vec lo(1), hi(1);
  lo << 0.0;
  hi << 1.0;
  const Dataset ds = Dataset::from_data_with_bounds(x, y, lo, hi);
  Mat xn(1, 1), yn(1, 1);
  xn << 0.3;
  yn << 10.0;
  const Dataset grown = ds.appended(xn, yn);
  CHECK(grown.n() == 4);
  CHECK(grown.x_lower(0) == 0.0);
  CHECK(grown.x_upper(0) == 1.0);
  CHECK(std::abs(grown.y_std.col(0).mean()) < 1e-12);
}

TEST_CASE("csv round trip and parse errors") {
  const fs::path dir = temp_dir("csv");
  Mat values(2, 3);
  values << 1.5, -2.25, 3.0000000000000004, 0.1, 1e-17, -42.0;
  write_csv(dir / "t.csv", {"a", "b", "c"}, values);
  const CsvTable t = read_csv(dir / "t.csv");
  CHECK(t.header.size() == 3);
  CHECK(t.values.rows() == 2);
  for (Index i = 0; i < 2; ++i) {
    for (Index j = 0; j < 3; ++j) CHECK(t.values(i, j) == values(i, j));
  }

  {
    std::ofstream bad(dir / "bad.csv");
    bad << "a,b\n1.0,2.0\n3.0,oops\n";
  }
  try {
    read_csv(dir / "bad.csv");
    FAIL("expected DataError");
  } catch (const DataError& e) {
    CHECK(e.line == 3);
  }

  {
    std::ofstream nan_file(dir / "nan.csv");
    nan_file << "a\nnan\n";
  }
  CHECK_THROWS_AS(read_csv(dir / "nan.csv"), DataError);

  {
    std::ofstream ragged(dir / "ragged.csv");
    ragged << "a,b\n1.0\n";
  }
  CHECK_THROWS_AS(read_csv(dir / "ragged.csv"), DataError);

  // Header-only file: zero rows.
  {
    std::ofstream empty_body(dir / "empty.csv");
    empty_body << "a,b\n";
  }
  const CsvTable empty = read_csv(dir / "empty.csv");
  CHECK(empty.values.rows() == 0);
  CHECK(empty.values.cols() == 2);

  fs::remove_all(dir);
}

TEST_CASE("chain bundle round trip reproduces predictions bitwise") {
  const Dataset data = forrester_data(9, 4);
  SamplerConfig cfg;
  cfg.iterations = 120;
  cfg.burn_in = 40;
  cfg.thinning = 2;
  cfg.seed = 17;
  const Chain chain = run_chain(data, cfg);

  const fs::path dir = temp_dir("bundle");
  save_chain(chain, data, dir);
  const ChainBundle loaded = load_chain(dir);

  CHECK(loaded.chain.size() == chain.size());
  CHECK(loaded.chain.meta.layers == 2);
  CHECK(loaded.chain.config.seed == cfg.seed);

  Mat x_star(5, 1);
  x_star << 0.05, 0.25, 0.5, 0.75, 0.95;
  const Prediction a = predict(chain, x_star, data, 99);
  const Prediction b = predict(loaded.chain, x_star, loaded.train, 99);
  CHECK((a.mean - b.mean).cwiseAbs().maxCoeff() == 0.0);
  for (std::size_t i = 0; i < a.cov.size(); ++i) {
    CHECK((a.cov[i] - b.cov[i]).cwiseAbs().maxCoeff() == 0.0);
  }

  // Saving the loaded bundle again yields byte-identical files.
  const fs::path dir2 = temp_dir("bundle2");
  save_chain(loaded.chain, loaded.train, dir2);
  for (const auto& entry : fs::directory_iterator(dir)) {
    std::ifstream f1(entry.path(), std::ios::binary);
    std::ifstream f2(dir2 / entry.path().filename(), std::ios::binary);
    const std::string s1((std::istreambuf_iterator<char>(f1)),
                         std::istreambuf_iterator<char>());
    const std::string s2((std::istreambuf_iterator<char>(f2)),
                         std::istreambuf_iterator<char>());
    CHECK(s1 == s2);
  }
  fs::remove_all(dir);
  fs::remove_all(dir2);
}

TEST_CASE("shallow chain bundle round trip") {
  const Dataset data = forrester_data(9, 6);
  SamplerConfig cfg;
  cfg.iterations = 60;
  cfg.burn_in = 20;
  cfg.thinning = 1;
  cfg.seed = 3;
  const Chain chain = run_chain(data, cfg, 1);
  CHECK(chain.shallow());
  CHECK(chain.samples[0].theta_w == kShallowThetaSentinel);

  const fs::path dir = temp_dir("bundle_shallow");
  save_chain(chain, data, dir);
  const ChainBundle loaded = load_chain(dir);
  CHECK(loaded.chain.shallow());
  CHECK(loaded.chain.samples[0].theta_w == kShallowThetaSentinel);
  CHECK(loaded.chain.samples[0].b_hat_w.empty());
  fs::remove_all(dir);
}
