#include "auctionevt/calibrate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "auctionevt/parallel.hpp"
#include "auctionevt/special.hpp"
#include "rule_internal.hpp"

namespace aevt {

const char* to_string(CiTarget t) {
  switch (t) {
    case CiTarget::winner_sp: return "winner_sp";
    case CiTarget::seller_sp: return "seller_sp";
    case CiTarget::winner_fp: return "winner_fp";
    case CiTarget::seller_fp: return "seller_fp";
  }
  return "?";
}

CiTarget ci_target_from_string(const std::string& s) {
  if (s == "winner_sp") return CiTarget::winner_sp;
  if (s == "seller_sp") return CiTarget::seller_sp;
  if (s == "winner_fp") return CiTarget::winner_fp;
  if (s == "seller_fp") return CiTarget::seller_fp;
  throw std::invalid_argument("unknown CI target: " + s);
}

bool is_first_price(CiTarget t) {
  return t == CiTarget::winner_fp || t == CiTarget::seller_fp;
}
bool is_winner(CiTarget t) {
  return t == CiTarget::winner_sp || t == CiTarget::winner_fp;
}

std::vector<double> make_xi_grid(int M, double xi_lo, double xi_hi) {
  if (M < 2) throw std::invalid_argument("grid needs M >= 2");
  std::vector<double> grid(static_cast<std::size_t>(M));
  const double step = (xi_hi - xi_lo) / M;
  for (int m = 0; m < M; ++m) grid[static_cast<std::size_t>(m)] = xi_lo + m * step;
  return grid;
}

double WeightTable::lambda_at(double xi) const {
  if (grid.empty()) return 0.0;
  if (xi <= grid.front()) return weights.front();
  if (xi >= grid.back()) return weights.back();
  const auto it = std::upper_bound(grid.begin(), grid.end(), xi);
  const std::size_t hi = static_cast<std::size_t>(it - grid.begin());
  const std::size_t lo = hi - 1;
  const double t = (xi - grid[lo]) / (grid[hi] - grid[lo]);
  return (1.0 - t) * weights[lo] + t * weights[hi];
}

namespace {

struct GridDraws {
  // per grid point m: B normalized samples and their target values
  std::vector<std::vector<double>> z;     // [m], row-major B x N
  std::vector<std::vector<double>> ytgt;  // [m], length B
};

GridDraws simulate_grid_draws(const std::vector<double>& grid, CiTarget target, int n, int B,
                              const RngStream& rng) {
  const bool fp = is_first_price(target);
  const int N = n - 2;
  GridDraws out;
  out.z.resize(grid.size());
  out.ytgt.resize(grid.size());
  parallel_for(grid.size(), [&](std::size_t m) {
    RngStream r = rng.substream(m);
    auto& zr = out.z[m];
    auto& yr = out.ytgt[m];
    zr.resize(static_cast<std::size_t>(B) * N);
    yr.resize(static_cast<std::size_t>(B));
    for (int b = 0; b < B; ++b) {
      const std::vector<double> prices = detail::sample_prices_dispatch(fp, grid[m], n, r);
      const NormalizedPrices np = normalize_prices(prices);
      std::copy(np.z.begin(), np.z.end(), zr.begin() + static_cast<std::size_t>(b) * N);
      yr[static_cast<std::size_t>(b)] = detail::target_y(target, grid[m], np.min, np.range);
    }
  });
  return out;
}

}  // namespace

WeightTable calibrate_weights(CiTarget target, int n, double alpha,
                              const CalibrationConfig& cfg, bool verbose) {
  if (n < 3) throw std::invalid_argument("calibrate_weights: requires n >= 3");
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("calibrate_weights: requires 0 < alpha < 1");
  const int M = cfg.grid_size;
  const int B = cfg.draws;
  const int N = n - 2;
  const bool fp = is_first_price(target);
  const std::vector<double> grid = make_xi_grid(M, cfg.xi_lo, cfg.xi_hi);

  const GridDraws draws = simulate_grid_draws(grid, target, n, B, RngStream(cfg.seed));

  // Precompute, per (m, b): the lambda-independent LHS and, per candidate
  // xi_{m'}, the Y-density values; iterations then reduce to sparse saxpy
  // passes.  Values are stored exp-rescaled so the float tensor stays in
  // range; layout is [m][mp][b] so the b-loops stream contiguously.
  const std::size_t MB = static_cast<std::size_t>(M) * B;
  std::vector<float> g_tensor(MB * M);
  std::vector<float> lhs(MB);
  parallel_for(static_cast<std::size_t>(M), [&](std::size_t m) {
    std::vector<double> lkf(M), lfy(M);
    float* gm = g_tensor.data() + m * static_cast<std::size_t>(B) * M;
    for (int b = 0; b < B; ++b) {
      const std::span<const double> z(draws.z[m].data() + static_cast<std::size_t>(b) * N,
                                      static_cast<std::size_t>(N));
      const double y = draws.ytgt[m][static_cast<std::size_t>(b)];
      double cmax = -std::numeric_limits<double>::infinity();
      for (int mp = 0; mp < M; ++mp) {
        lkf[mp] = detail::log_kf_dispatch(z, grid[mp], fp);
        lfy[mp] = detail::log_fy_dispatch(y, z, grid[mp], target);
        cmax = std::max(cmax, lfy[mp]);
      }
      double lsum = 0.0;
      double lmax = *std::max_element(lkf.begin(), lkf.end());
      for (int mp = 0; mp < M; ++mp) lsum += std::exp(lkf[mp] - lmax);
      const double log_lhs = lmax + std::log(lsum / M);
      cmax = std::max(cmax, log_lhs);
      lhs[m * static_cast<std::size_t>(B) + b] = static_cast<float>(std::exp(log_lhs - cmax));
      for (int mp = 0; mp < M; ++mp)
        gm[static_cast<std::size_t>(mp) * B + b] = static_cast<float>(std::exp(lfy[mp] - cmax));
    }
    if (verbose) std::fprintf(stderr, "calibrate: grid point %zu/%d done\n", m + 1, M);
  });

  // fixed-point iteration on the Lagrange weights; zero weights are skipped,
  // so each pass streams only the active mp-slabs
  std::vector<double> lambda(static_cast<std::size_t>(M), 1.0 / M);
  std::vector<double> coverage(static_cast<std::size_t>(M), 0.0);
  const auto coverage_pass = [&] {
    parallel_for(static_cast<std::size_t>(M), [&](std::size_t m) {
      thread_local std::vector<float> rhs;
      rhs.assign(static_cast<std::size_t>(B), 0.0f);
      float* __restrict acc = rhs.data();
      const float* gm = g_tensor.data() + m * static_cast<std::size_t>(B) * M;
      for (int mp = 0; mp < M; ++mp) {
        const float lam = static_cast<float>(lambda[static_cast<std::size_t>(mp)]);
        if (lam <= 0.0f) continue;
        const float* __restrict row = gm + static_cast<std::size_t>(mp) * B;
        for (int b = 0; b < B; ++b) acc[b] += lam * row[b];
      }
      const float* __restrict lrow = lhs.data() + m * static_cast<std::size_t>(B);
      long hit = 0;
      for (int b = 0; b < B; ++b) hit += (lrow[b] <= acc[b]);
      coverage[m] = static_cast<double>(hit) / B;
    });
  };
  for (int s = 0; s < cfg.iterations; ++s) {
    coverage_pass();
    for (int m = 0; m < M; ++m) {
      const std::size_t mi = static_cast<std::size_t>(m);
      lambda[mi] = std::max(0.0, lambda[mi] + cfg.step * ((1.0 - coverage[mi]) - alpha));
    }
  }
  coverage_pass();  // final coverage under the settled weights

  const double floor_cov = 1.0 - alpha - 0.02;
  for (int m = 0; m < M; ++m) {
    if (coverage[static_cast<std::size_t>(m)] < floor_cov) {
      std::ostringstream os;
      os << "calibration failed to reach coverage " << floor_cov << "; per-point coverage:";
      for (int k = 0; k < M; ++k)
        os << " xi=" << grid[static_cast<std::size_t>(k)] << ":"
           << coverage[static_cast<std::size_t>(k)];
      throw CalibrationFailure(os.str(), coverage);
    }
  }

  WeightTable table;
  table.target = target;
  table.n = n;
  table.alpha = alpha;
  table.config = cfg;
  table.grid = grid;
  table.weights = std::move(lambda);
  table.c_mu.resize(grid.size());
  for (std::size_t m = 0; m < grid.size(); ++m) table.c_mu[m] = winner_gap_mean(grid[m]);
  return table;
}

double coverage_estimate(const WeightTable& table, double xi, int B, RngStream& rng) {
  require_xi_in_space(xi);
  const bool fp = is_first_price(table.target);
  long hit = 0;
  for (int b = 0; b < B; ++b) {
    const std::vector<double> prices = detail::sample_prices_dispatch(fp, xi, table.n, rng);
    const NormalizedPrices np = normalize_prices(prices);
    const double y = detail::target_y(table.target, xi, np.min, np.range);
    const double lhs = detail::log_lhs_w_average(np.z, table.grid, fp);
    const double rhs = detail::log_rhs_lambda(y, np.z, table);
    hit += (lhs <= rhs);
  }
  return static_cast<double>(hit) / B;
}

std::vector<double> coverage_audit(const WeightTable& table, int B, const RngStream& rng) {
  std::vector<double> out(table.grid.size());
  parallel_for(table.grid.size(), [&](std::size_t m) {
    RngStream r = rng.substream(m);
    out[m] = coverage_estimate(table, table.grid[m], B, r);
  });
  return out;
}

namespace {

std::uint64_t fnv1a64(const std::string& data) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

nlohmann::json payload_json(const WeightTable& t) {
  nlohmann::json j;
  j["format_version"] = t.format_version;
  j["target"] = to_string(t.target);
  j["n"] = t.n;
  j["alpha"] = t.alpha;
  j["config"] = {{"M", t.config.grid_size},   {"B", t.config.draws},
                 {"S", t.config.iterations},  {"epsilon", t.config.step},
                 {"seed", t.config.seed},     {"xi_lo", t.config.xi_lo},
                 {"xi_hi", t.config.xi_hi}};
  j["grid"] = t.grid;
  j["weights"] = t.weights;
  j["c_mu"] = t.c_mu;
  return j;
}

std::string checksum_hex(const nlohmann::json& payload) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64(payload.dump())));
  return std::string(buf);
}

}  // namespace

std::string WeightTable::id() const { return checksum_hex(payload_json(*this)); }

void save_table(const WeightTable& table, const std::filesystem::path& path) {
  nlohmann::json payload = payload_json(table);
  nlohmann::json file;
  file["payload"] = payload;
  file["checksum"] = checksum_hex(payload);
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open for writing: " + path.string());
  os << file.dump(2) << '\n';
}

WeightTable load_table(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open weight table: " + path.string());
  nlohmann::json file = nlohmann::json::parse(is);
  const nlohmann::json& payload = file.at("payload");
  const std::string expect = file.at("checksum").get<std::string>();
  if (checksum_hex(payload) != expect)
    throw std::runtime_error("weight table checksum mismatch: " + path.string());
  WeightTable t;
  t.format_version = payload.at("format_version").get<int>();
  if (t.format_version != 1)
    throw std::runtime_error("unsupported weight table version in " + path.string());
  t.target = ci_target_from_string(payload.at("target").get<std::string>());
  t.n = payload.at("n").get<int>();
  t.alpha = payload.at("alpha").get<double>();
  const nlohmann::json& c = payload.at("config");
  t.config.grid_size = c.at("M").get<int>();
  t.config.draws = c.at("B").get<int>();
  t.config.iterations = c.at("S").get<int>();
  t.config.step = c.at("epsilon").get<double>();
  t.config.seed = c.at("seed").get<std::uint64_t>();
  t.config.xi_lo = c.at("xi_lo").get<double>();
  t.config.xi_hi = c.at("xi_hi").get<double>();
  t.grid = payload.at("grid").get<std::vector<double>>();
  t.weights = payload.at("weights").get<std::vector<double>>();
  t.c_mu = payload.at("c_mu").get<std::vector<double>>();
  if (t.grid.size() != t.weights.size() || t.grid.empty())
    throw std::runtime_error("malformed weight table: " + path.string());
  return t;
}

void require_table_matches(const WeightTable& table, CiTarget target, int n, double alpha) {
  if (table.target != target)
    throw std::invalid_argument(std::string("weight table target is ") +
                                to_string(table.target) + ", need " + to_string(target));
  if (table.n != n)
    throw std::invalid_argument("weight table was calibrated for n=" + std::to_string(table.n) +
                                ", data has n=" + std::to_string(n));
  if (std::fabs(table.alpha - alpha) > 1e-12)
    throw std::invalid_argument("weight table alpha mismatch");
}

}  // namespace aevt
