#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "auctionevt/calibrate.hpp"
#include "auctionevt/inference.hpp"
#include "auctionevt/rng.hpp"

namespace aevt {

// Valuation designs of the simulation study; implied_xi is the tail index of
// the corresponding domain of attraction.
enum class DgpFamily { uniform_0_3, abs_normal, abs_t20, pareto_025 };

struct DGPSpec {
  DgpFamily family = DgpFamily::uniform_0_3;
  double implied_xi = -1.0;
  double v_lower = 0.0;  // lower support point
  std::string name;
};
DGPSpec make_dgp(DgpFamily family);
DGPSpec dgp_from_string(const std::string& name);

double dgp_cdf(const DGPSpec& spec, double v);
std::vector<double> dgp_sample(const DGPSpec& spec, int K, RngStream& rng);

// transaction price = second-highest valuation
double simulate_auction_sp(std::span<const double> valuations);

// equilibrium first-price bid of the highest-valuation bidder:
// v - int_{vL}^{v} F^{K-1} du / F(v)^{K-1}, quadrature against the exact CDF
double fp_equilibrium_bid(const DGPSpec& spec, double v, int K);
double simulate_auction_fp(std::span<const double> valuations, const DGPSpec& spec);

// number-of-bidders design: fixed K, or uniform integer on {lo..hi}
struct KSpec {
  int lo = 0;
  int hi = 0;
  bool random() const { return hi > lo; }
  int nominal() const { return (lo + hi) / 2; }
  std::string label() const;
};

// ground-truth winner utility / seller revenue per K (deterministic quadrature)
double true_mu(const DGPSpec& spec, int K);
double true_pi(const DGPSpec& spec, int K);
double true_mu(const DGPSpec& spec, const KSpec& ks);  // averaged over the K law
double true_pi(const DGPSpec& spec, const KSpec& ks);

struct SimpleCI {
  double lo = 0.0;
  double hi = 0.0;
};

// comparator (ii): t-statistic CI from per-auction gaps, normal quantile
SimpleCI ci_tstat_comparator(std::span<const double> gaps, double alpha);

// comparator (iii) second-price: plug-in estimate of mu_K by inverting
// F_P = F_V^K + K F_V^{K-1}(1-F_V) at the empirical price CDF, percentile
// bootstrap over B_boot resamples
double invert_price_cdf_sp(double p, int K);  // monotone root-find, F_V in [0,1]
double bootstrap_sp_estimate(std::span<const double> prices, int K);
SimpleCI ci_bootstrap_sp(std::span<const double> prices, int K, double alpha, int B_boot,
                         RngStream& rng);

// comparator (iii) first-price variant from observed highest valuations,
// F_V = F_{V(1)}^{1/K}
double bootstrap_fp_estimate(std::span<const double> highest_valuations, int K);
SimpleCI ci_bootstrap_fp(std::span<const double> highest_valuations, int K, double alpha,
                         int B_boot, RngStream& rng);

inline constexpr int kDefaultBootstrapSamples = 500;
inline constexpr int kDeskScaleReps = 200;
inline constexpr int kFullScaleReps = 500;

enum class CiMethod { ours, tstat, bootstrap };
const char* to_string(CiMethod m);

struct ExperimentDesign {
  DGPSpec dgp;
  int n = 10;
  KSpec k;
  AuctionFormat format = AuctionFormat::second_price;
  CiTarget target = CiTarget::winner_sp;  // for coverage experiments
  double alpha = 0.05;
};

struct ExperimentRow {
  std::string dgp;
  int n = 0;
  std::string k_label;
  std::string method;
  std::string metric;  // "coverage" or "rejection"
  double estimate = 0.0;
  double mean_length = 0.0;
  int reps = 0;
  std::uint64_t seed = 0;
};

struct ExperimentReport {
  std::vector<ExperimentRow> rows;
  std::uint64_t seed = 0;
  std::string to_csv() const;
  std::string to_markdown() const;
  std::string to_json() const;
};

// coverage frequency and mean length of the requested CI methods
ExperimentReport run_coverage_experiment(const ExperimentDesign& design,
                                         const std::vector<CiMethod>& methods, int reps,
                                         const WeightTable* table, const RngStream& rng);

// rejection frequency of the regularity test on simulated transaction prices
ExperimentReport run_test_experiment(const ExperimentDesign& design, int reps,
                                     const RngStream& rng, int n_sim = kDefaultTestSims);

}  // namespace aevt
