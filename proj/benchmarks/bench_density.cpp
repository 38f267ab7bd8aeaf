#include <benchmark/benchmark.h>

#include <vector>

#include "auctionevt/calibrate.hpp"
#include "auctionevt/density_fp.hpp"
#include "auctionevt/density_sp.hpp"
#include "auctionevt/evt.hpp"
#include "auctionevt/inference.hpp"
#include "auctionevt/rng.hpp"

namespace {

std::vector<double> simplex_point(int n) {
  std::vector<double> z(static_cast<std::size_t>(n - 2));
  for (std::size_t j = 0; j < z.size(); ++j)
    z[j] = static_cast<double>(j + 1) / (z.size() + 1);
  return z;
}

void BM_density_znorm(benchmark::State& state) {
  const auto z = simplex_point(static_cast<int>(state.range(0)));
  const double xi = state.range(1) / 100.0;
  for (auto _ : state) benchmark::DoNotOptimize(aevt::log_density_znorm(z, xi));
}
BENCHMARK(BM_density_znorm)->Args({4, -50})->Args({4, 25})->Args({10, 25})->Args({100, 25});

void BM_kappa_density(benchmark::State& state) {
  const auto z = simplex_point(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(aevt::log_kappa_density(z, -0.5));
}
BENCHMARK(BM_kappa_density)->Arg(4)->Arg(10);

void BM_joint_density_ymu(benchmark::State& state) {
  const auto z = simplex_point(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(aevt::log_joint_density_ymu(0.9, z, -0.5));
}
BENCHMARK(BM_joint_density_ymu)->Arg(4)->Arg(10);

void BM_joint_density_ypi(benchmark::State& state) {
  const auto z = simplex_point(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(aevt::log_joint_density_ypi(0.4, z, -0.5));
}
BENCHMARK(BM_joint_density_ypi)->Arg(4)->Arg(10);

void BM_density_xnorm_fp(benchmark::State& state) {
  const auto z = simplex_point(static_cast<int>(state.range(0)));
  (void)aevt::fit_r_coefficients(0.25);  // warm the cache outside the loop
  for (auto _ : state) benchmark::DoNotOptimize(aevt::log_density_xnorm(z, 0.25));
}
BENCHMARK(BM_density_xnorm_fp)->Arg(4)->Arg(10);

void BM_composite_statistic(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const aevt::CompositeTest test(n, -1.0, aevt::uniform_weight(-1.0, 0.5), 0.05,
                                 aevt::RngStream(1), aevt::AuctionFormat::second_price, 200);
  aevt::RngStream rng(2);
  const auto prices = aevt::sample_limit_prices(-0.2, n, aevt::LimitOrder::second, rng);
  for (auto _ : state) benchmark::DoNotOptimize(test.log_statistic(prices));
}
BENCHMARK(BM_composite_statistic)->Arg(4)->Arg(10);

void BM_e_transform(benchmark::State& state) {
  double x = 0.3;
  for (auto _ : state) {
    benchmark::DoNotOptimize(aevt::e_transform(x, -0.5));
    x = x < 10.0 ? x + 1e-4 : 0.3;
  }
}
BENCHMARK(BM_e_transform);

void BM_calibration_pass(benchmark::State& state) {
  // one full coverage pass at desk scale (M=12, B=2000)
  aevt::CalibrationConfig cfg;
  cfg.grid_size = 12;
  cfg.draws = 2000;
  cfg.iterations = 1;
  cfg.seed = 5;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        aevt::calibrate_weights(aevt::CiTarget::seller_sp, 4, 0.993, cfg));
  }
}
BENCHMARK(BM_calibration_pass)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
