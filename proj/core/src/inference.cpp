#include "auctionevt/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "auctionevt/parallel.hpp"
#include "auctionevt/quadrature.hpp"
#include "rule_internal.hpp"

namespace aevt {

const char* to_string(AuctionFormat f) {
  return f == AuctionFormat::second_price ? "sp" : "fp";
}

AuctionFormat auction_format_from_string(const std::string& s) {
  if (s == "sp" || s == "second_price") return AuctionFormat::second_price;
  if (s == "fp" || s == "first_price") return AuctionFormat::first_price;
  throw std::invalid_argument("unknown auction format: " + s);
}

namespace {

constexpr double kScanLo = 1e-4;  // |y| scan bounds for the set rule
constexpr double kScanHi = 1e4;
constexpr int kScanPoints = 2000;  // log-spaced candidates before bisection

struct RuleContext {
  const WeightTable& table;
  std::span<const double> z;
  double log_lhs;
  bool inside(double y) const {
    return detail::log_rhs_lambda(y, z, table) >= log_lhs;
  }
};

double bisect_edge(const RuleContext& ctx, double y_out, double y_in) {
  // edge of {y : rhs >= lhs} between an outside and an inside point
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (y_out + y_in);
    if (ctx.inside(mid))
      y_in = mid;
    else
      y_out = mid;
    if (std::fabs(y_in - y_out) <= 1e-6 * std::max(1e-8, std::fabs(y_in))) break;
  }
  return y_in;
}

// scan candidates, locate the single run of inside points, bisect both edges
std::pair<double, double> interval_from_scan(const RuleContext& ctx,
                                             const std::vector<double>& grid) {
  std::vector<char> in(grid.size());
  int runs = 0;
  bool prev = false;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    in[k] = ctx.inside(grid[k]);
    if (in[k] && !prev) ++runs;
    prev = in[k];
  }
  if (runs == 0)
    throw std::runtime_error(
        "interval rule: acceptance region empty on the scan grid (numeric failure)");
  if (runs > 1)
    throw std::runtime_error(
        "interval rule: acceptance region is not an interval (disjoint segments detected)");
  std::size_t first = 0, last = 0;
  for (std::size_t k = 0; k < grid.size(); ++k)
    if (in[k]) {
      first = k;
      break;
    }
  for (std::size_t k = grid.size(); k-- > 0;)
    if (in[k]) {
      last = k;
      break;
    }
  const double lo =
      first == 0 ? grid.front() : bisect_edge(ctx, grid[first - 1], grid[first]);
  const double hi =
      last + 1 == grid.size() ? grid.back() : bisect_edge(ctx, grid[last + 1], grid[last]);
  return {lo, hi};
}

std::vector<double> winner_scan_grid() {
  std::vector<double> g(kScanPoints);
  const double step = std::log(kScanHi / kScanLo) / (kScanPoints - 1);
  for (int k = 0; k < kScanPoints; ++k) g[k] = kScanLo * std::exp(k * step);
  return g;
}

std::vector<double> seller_scan_grid() {
  // +/- log-spaced magnitudes plus 0, ascending
  const int half = kScanPoints / 2;
  std::vector<double> g;
  g.reserve(2 * half + 1);
  const double step = std::log(kScanHi / kScanLo) / (half - 1);
  for (int k = 0; k < half; ++k) g.push_back(-kScanHi * std::exp(-k * step));
  g.push_back(0.0);
  for (int k = 0; k < half; ++k) g.push_back(kScanLo * std::exp(k * step));
  return g;
}

CIResult ci_impl(std::span<const double> prices, const WeightTable& table, double alpha,
                 CiTarget target) {
  require_table_matches(table, target, static_cast<int>(prices.size()), alpha);
  const NormalizedPrices np = normalize_prices(prices);
  if (!(np.range > 0.0))
    throw std::invalid_argument("degenerate sample: all transaction prices equal");
  const bool fp = is_first_price(target);
  RuleContext ctx{table, np.z, detail::log_lhs_w_average(np.z, table.grid, fp)};
  const std::vector<double> grid = is_winner(target) ? winner_scan_grid() : seller_scan_grid();
  const auto [zlo, zhi] = interval_from_scan(ctx, grid);
  CIResult r;
  r.z_lo = zlo;
  r.z_hi = zhi;
  if (is_winner(target)) {
    r.lo = np.range * zlo;
    r.hi = np.range * zhi;
  } else {
    r.lo = np.min + np.range * zlo;
    r.hi = np.min + np.range * zhi;
  }
  r.target = target;
  r.alpha = alpha;
  r.n = static_cast<int>(prices.size());
  r.weight_table_id = table.id();
  return r;
}

}  // namespace

CIResult ci_winner_sp(std::span<const double> prices, const WeightTable& table, double alpha) {
  return ci_impl(prices, table, alpha, CiTarget::winner_sp);
}
CIResult ci_seller_sp(std::span<const double> prices, const WeightTable& table, double alpha) {
  return ci_impl(prices, table, alpha, CiTarget::seller_sp);
}
CIResult ci_winner_fp(std::span<const double> prices, const WeightTable& table, double alpha) {
  return ci_impl(prices, table, alpha, CiTarget::winner_fp);
}
CIResult ci_seller_fp(std::span<const double> prices, const WeightTable& table, double alpha) {
  return ci_impl(prices, table, alpha, CiTarget::seller_fp);
}
CIResult ci_for_target(std::span<const double> prices, const WeightTable& table, double alpha) {
  return ci_impl(prices, table, alpha, table.target);
}

AltWeight uniform_weight(double xi_lo, double xi_hi, int points) {
  if (!(xi_lo < xi_hi)) throw std::invalid_argument("uniform_weight: xi_lo < xi_hi");
  const QuadratureRule gl = gauss_legendre(points);
  AltWeight w;
  w.nodes.resize(gl.nodes.size());
  w.weights.resize(gl.nodes.size());
  for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
    w.nodes[i] = 0.5 * (xi_hi - xi_lo) * gl.nodes[i] + 0.5 * (xi_hi + xi_lo);
    w.weights[i] = 0.5 * gl.weights[i];  // integrates to 1 over [xi_lo, xi_hi]
  }
  w.label = "uniform(" + std::to_string(xi_lo) + ", " + std::to_string(xi_hi) + "]";
  return w;
}

CompositeTest::CompositeTest(int n, double xi0, AltWeight weight, double alpha,
                             const RngStream& rng, AuctionFormat format, int n_sim)
    : n_(n),
      xi0_(xi0),
      weight_(std::move(weight)),
      alpha_(alpha),
      format_(format),
      seed_(rng.seed()) {
  if (n < 3) throw std::invalid_argument("test needs n >= 3");
  require_xi_in_space(xi0);
  const bool fp = format == AuctionFormat::first_price;
  null_log_stats_.resize(static_cast<std::size_t>(n_sim));
  parallel_for(static_cast<std::size_t>(n_sim), [&](std::size_t i) {
    RngStream r = rng.substream(0xC0DE + i);
    const std::vector<double> prices = detail::sample_prices_dispatch(fp, xi0_, n_, r);
    null_log_stats_[i] = log_statistic_normalized(normalize_prices(prices).z);
  });
  std::sort(null_log_stats_.begin(), null_log_stats_.end());
  // (1-alpha)-quantile as an order statistic
  const std::size_t idx = std::min(
      null_log_stats_.size() - 1,
      static_cast<std::size_t>(std::ceil((1.0 - alpha) * n_sim)) - 1);
  log_critical_ = null_log_stats_[idx];
}

double CompositeTest::log_statistic_normalized(std::span<const double> z) const {
  const bool fp = format_ == AuctionFormat::first_price;
  double m = -std::numeric_limits<double>::infinity();
  std::vector<double> vals(weight_.nodes.size());
  for (std::size_t i = 0; i < weight_.nodes.size(); ++i) {
    vals[i] = detail::log_f_dispatch(z, weight_.nodes[i], fp) + std::log(weight_.weights[i]);
    m = std::max(m, vals[i]);
  }
  double sum = 0.0;
  for (double v : vals) sum += std::exp(v - m);
  const double log_num = m + std::log(sum);
  return log_num - detail::log_f_dispatch(z, xi0_, fp);
}

double CompositeTest::log_statistic(std::span<const double> prices) const {
  if (static_cast<int>(prices.size()) != n_)
    throw std::invalid_argument("test was prepared for n=" + std::to_string(n_));
  return log_statistic_normalized(normalize_prices(prices).z);
}

double CompositeTest::p_value(double log_stat) const {
  const auto it =
      std::lower_bound(null_log_stats_.begin(), null_log_stats_.end(), log_stat);
  return static_cast<double>(null_log_stats_.end() - it) /
         static_cast<double>(null_log_stats_.size());
}

TestResult CompositeTest::run(std::span<const double> prices) const {
  TestResult t;
  t.log_statistic = log_statistic(prices);
  t.statistic = std::exp(t.log_statistic);
  t.log_critical_value = log_critical_;
  t.critical_value = std::exp(log_critical_);
  t.reject = t.log_statistic > log_critical_;
  t.p_value = p_value(t.log_statistic);
  t.xi0 = xi0_;
  t.alpha = alpha_;
  t.alternative = weight_.label;
  t.seed = seed_;
  t.n_sim = static_cast<int>(null_log_stats_.size());
  return t;
}

TestResult test_composite(std::span<const double> prices, double xi0, const AltWeight& weight,
                          double alpha, const RngStream& rng, AuctionFormat format, int n_sim) {
  CompositeTest t(static_cast<int>(prices.size()), xi0, weight, alpha, rng, format, n_sim);
  return t.run(prices);
}

TestResult test_simple(std::span<const double> prices, double xi0, double xi1, double alpha,
                       const RngStream& rng, AuctionFormat format, int n_sim) {
  if (xi0 == xi1) throw std::invalid_argument("test_simple: xi0 and xi1 must differ");
  require_xi_in_space(xi1);
  AltWeight w;
  w.nodes = {xi1};
  w.weights = {1.0};
  w.label = "xi = " + std::to_string(xi1);
  return test_composite(prices, xi0, w, alpha, rng, format, n_sim);
}

TestResult test_regularity(std::span<const double> prices, double alpha, const RngStream& rng,
                           AuctionFormat format, int n_sim) {
  return test_composite(prices, -1.0, uniform_weight(-1.0, 0.5), alpha, rng, format, n_sim);
}

std::vector<PowerCurvePoint> power_curve(std::span<const double> xi_grid,
                                         std::span<const int> n_values, double alpha, int reps,
                                         const RngStream& rng, AuctionFormat format, int n_sim) {
  std::vector<PowerCurvePoint> out;
  const bool fp = format == AuctionFormat::first_price;
  for (const int n : n_values) {
    const CompositeTest test(n, -1.0, uniform_weight(-1.0, 0.5), alpha, rng.substream(n), format,
                             n_sim);
    for (const double xi : xi_grid) {
      std::vector<char> rejected(static_cast<std::size_t>(reps));
      parallel_for(static_cast<std::size_t>(reps), [&](std::size_t rep) {
        RngStream r = rng.substream(0xF00D + n).substream(rep * 997 + static_cast<std::size_t>(
                                                              (xi - kXiMin) * 1e6));
        const std::vector<double> prices = detail::sample_prices_dispatch(fp, xi, n, r);
        rejected[rep] = test.reject(test.log_statistic_normalized(normalize_prices(prices).z));
      });
      PowerCurvePoint p;
      p.xi = xi;
      p.n = n;
      p.reps = reps;
      long cnt = 0;
      for (char c : rejected) cnt += c;
      p.rejection_rate = static_cast<double>(cnt) / reps;
      out.push_back(p);
    }
  }
  return out;
}

}  // namespace aevt
