#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "auctionevt/calibrate.hpp"
#include "auctionevt/rng.hpp"

using namespace aevt;

namespace {
CalibrationConfig small_cfg(int M = 10, int B = 1500, int S = 2500, std::uint64_t seed = 42) {
  CalibrationConfig cfg;
  cfg.grid_size = M;
  cfg.draws = B;
  cfg.iterations = S;
  cfg.seed = seed;
  return cfg;
}
}  // namespace

TEST_CASE("xi grid: left endpoints of M equal subintervals") {
  const auto g = make_xi_grid(50);
  REQUIRE(g.size() == 50);
  CHECK(g.front() == doctest::Approx(-1.0));
  CHECK(g[1] - g[0] == doctest::Approx(1.5 / 50));
  CHECK(g.back() == doctest::Approx(-1.0 + 49 * 1.5 / 50));
  for (std::size_t i = 1; i < g.size(); ++i) CHECK(g[i] > g[i - 1]);
}

TEST_CASE("defaults match the published algorithm constants") {
  const CalibrationConfig cfg;
  CHECK(cfg.grid_size == 50);
  CHECK(cfg.draws == 10000);
  CHECK(cfg.iterations == 2000);
  CHECK(cfg.step == doctest::Approx(0.05));
}

TEST_CASE("zero iterations keep the uniform initial weights") {
  // alpha close to 1 makes the coverage floor vacuous, exposing the
  // untouched initialization lambda = 1/M
  CalibrationConfig cfg = small_cfg(8, 400, 0);
  const WeightTable t = calibrate_weights(CiTarget::seller_sp, 4, 0.993, cfg);
  for (const double w : t.weights) CHECK(w == doctest::Approx(1.0 / 8));
}

TEST_CASE("one update applies lambda += eps((1 - P) - alpha) exactly") {
  // at the uniform initialization the interval set is empty for these draws
  // (P-hat = 0, verified by the S=0 audit), pinning the increment
  const double alpha = 0.993;
  CalibrationConfig cfg = small_cfg(8, 400, 1);
  const WeightTable t1 = calibrate_weights(CiTarget::seller_sp, 4, alpha, cfg);
  for (const double w : t1.weights)
    CHECK(w == doctest::Approx(1.0 / 8 + cfg.step * (1.0 - alpha)).epsilon(1e-12));
}

TEST_CASE("weights stay nonnegative under the zero clamp") {
  CalibrationConfig cfg = small_cfg(8, 400, 2500);
  const WeightTable t = calibrate_weights(CiTarget::seller_sp, 4, 0.993, cfg);
  bool any_zero = false;
  for (const double w : t.weights) {
    CHECK(w >= 0.0);
    any_zero = any_zero || w == 0.0;
  }
  CHECK(any_zero);  // overcovered grid points get driven into the clamp
}

TEST_CASE("calibration is deterministic in (config, seed)") {
  const CalibrationConfig cfg = small_cfg();
  const WeightTable a = calibrate_weights(CiTarget::seller_sp, 4, 0.05, cfg);
  const WeightTable b = calibrate_weights(CiTarget::seller_sp, 4, 0.05, cfg);
  REQUIRE(a.weights.size() == b.weights.size());
  for (std::size_t i = 0; i < a.weights.size(); ++i) CHECK(a.weights[i] == b.weights[i]);
  CHECK(a.id() == b.id());
}

TEST_CASE("weights table round-trips through disk bit-exactly") {
  const CalibrationConfig cfg = small_cfg();
  const WeightTable t = calibrate_weights(CiTarget::seller_sp, 4, 0.05, cfg);
  const auto dir = std::filesystem::temp_directory_path();
  const auto p1 = dir / "aevt_t1.json";
  const auto p2 = dir / "aevt_t2.json";
  save_table(t, p1);
  const WeightTable loaded = load_table(p1);
  save_table(loaded, p2);
  std::ifstream f1(p1), f2(p2);
  const std::string s1((std::istreambuf_iterator<char>(f1)), {});
  const std::string s2((std::istreambuf_iterator<char>(f2)), {});
  CHECK(s1 == s2);
  CHECK(loaded.id() == t.id());
  for (std::size_t i = 0; i < t.weights.size(); ++i)
    CHECK(loaded.weights[i] == t.weights[i]);  // bitwise
}

TEST_CASE("loading rejects mismatched use and corrupted files") {
  const CalibrationConfig cfg = small_cfg();
  const WeightTable t = calibrate_weights(CiTarget::seller_sp, 4, 0.05, cfg);
  CHECK_THROWS_AS(require_table_matches(t, CiTarget::seller_sp, 5, 0.05),
                  std::invalid_argument);
  CHECK_THROWS_AS(require_table_matches(t, CiTarget::winner_sp, 4, 0.05),
                  std::invalid_argument);
  CHECK_THROWS_AS(require_table_matches(t, CiTarget::seller_sp, 4, 0.10),
                  std::invalid_argument);
  const auto p = std::filesystem::temp_directory_path() / "aevt_corrupt.json";
  save_table(t, p);
  std::string text;
  {
    std::ifstream is(p);
    text.assign((std::istreambuf_iterator<char>(is)), {});
  }
  const auto pos = text.find("\"alpha\": 0.05");
  REQUIRE(pos != std::string::npos);
  text.replace(pos, 13, "\"alpha\": 0.15");
  {
    std::ofstream os(p);
    os << text;
  }
  CHECK_THROWS_WITH_AS((void)load_table(p), doctest::Contains("checksum"), std::runtime_error);
}

TEST_CASE("lambda interpolation is piecewise linear with clamped ends") {
  WeightTable t;
  t.grid = {-1.0, 0.0, 0.5};
  t.weights = {2.0, 4.0, 1.0};
  CHECK(t.lambda_at(-2.0) == 2.0);
  CHECK(t.lambda_at(-1.0) == 2.0);
  CHECK(t.lambda_at(-0.5) == doctest::Approx(3.0));
  CHECK(t.lambda_at(0.25) == doctest::Approx(2.5));
  CHECK(t.lambda_at(0.9) == 1.0);
}

TEST_CASE("coverage_estimate has binomial-scale noise") {
  const CalibrationConfig cfg = small_cfg();
  const WeightTable t = calibrate_weights(CiTarget::seller_sp, 4, 0.05, cfg);
  RngStream r1(101), r2(202);
  const int B = 4000;
  const double p1 = coverage_estimate(t, -0.4, B, r1);
  const double p2 = coverage_estimate(t, -0.4, B, r2);
  const double se = std::sqrt(p1 * (1 - p1) / B + p2 * (1 - p2) / B);
  CHECK(std::fabs(p1 - p2) < 4.0 * se + 1e-9);
}

TEST_CASE("calibration failure reports per-point coverage") {
  // starving the iteration at a strict alpha leaves undercovered grid points
  CalibrationConfig cfg = small_cfg(10, 800, 0);
  try {
    (void)calibrate_weights(CiTarget::winner_sp, 4, 0.05, cfg);
    FAIL("expected CalibrationFailure");
  } catch (const CalibrationFailure& e) {
    CHECK(e.coverage.size() == 10);
    CHECK(std::string(e.what()).find("coverage") != std::string::npos);
  }
}
