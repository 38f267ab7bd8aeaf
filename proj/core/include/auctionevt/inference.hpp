#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "auctionevt/calibrate.hpp"
#include "auctionevt/rng.hpp"

namespace aevt {

enum class AuctionFormat { second_price, first_price };
const char* to_string(AuctionFormat f);
AuctionFormat auction_format_from_string(const std::string& s);

struct CIResult {
  double lo = 0.0;
  double hi = 0.0;  // price units
  double z_lo = 0.0;
  double z_hi = 0.0;  // normalized units (the set-rule interval)
  CiTarget target = CiTarget::winner_sp;
  double alpha = 0.05;
  int n = 0;
  std::string weight_table_id;
};

// Minimum-weighted-length CI for the winner's expected utility / the seller's
// expected revenue, built from the weighted-density interval set and scaled
// back to price units (range x interval, plus P_(1) for the seller).
// Throws std::invalid_argument on degenerate samples (all prices equal) or
// table mismatch, and std::runtime_error if the acceptance region is not an
// interval (>= 2 disjoint segments in the scan).
CIResult ci_winner_sp(std::span<const double> prices, const WeightTable& table, double alpha);
CIResult ci_seller_sp(std::span<const double> prices, const WeightTable& table, double alpha);
CIResult ci_winner_fp(std::span<const double> prices, const WeightTable& table, double alpha);
CIResult ci_seller_fp(std::span<const double> prices, const WeightTable& table, double alpha);
CIResult ci_for_target(std::span<const double> prices, const WeightTable& table, double alpha);

// weight over the alternative space, as a normalized discrete quadrature
struct AltWeight {
  std::vector<double> nodes;
  std::vector<double> weights;  // sum to 1
  std::string label;
};
AltWeight uniform_weight(double xi_lo, double xi_hi, int points = 100);

struct TestResult {
  double statistic = 0.0;  // likelihood ratio (linear scale)
  double log_statistic = 0.0;
  double critical_value = 0.0;
  double log_critical_value = 0.0;
  bool reject = false;
  double p_value = 1.0;
  double xi0 = 0.0;
  double alpha = 0.05;
  std::string alternative;
  std::uint64_t seed = 0;
  int n_sim = 0;
};

inline constexpr int kDefaultTestSims = 100000;

// Likelihood-ratio test of H0: xi = xi0 against the simple alternative
// xi = xi1; critical value is the simulated (1-alpha)-quantile of the
// statistic under the null limit law.
TestResult test_simple(std::span<const double> prices, double xi0, double xi1, double alpha,
                       const RngStream& rng, AuctionFormat format = AuctionFormat::second_price,
                       int n_sim = kDefaultTestSims);

// Weighted-average-power test against the composite alternative carried by W.
TestResult test_composite(std::span<const double> prices, double xi0, const AltWeight& weight,
                          double alpha, const RngStream& rng,
                          AuctionFormat format = AuctionFormat::second_price,
                          int n_sim = kDefaultTestSims);

// Regularity-conditions test: H0: xi = -1 vs uniform W on (-1, 0.5].
TestResult test_regularity(std::span<const double> prices, double alpha, const RngStream& rng,
                           AuctionFormat format = AuctionFormat::second_price,
                           int n_sim = kDefaultTestSims);

// Reusable composite test with the null distribution simulated once; used by
// the Monte Carlo harness and power curves.
class CompositeTest {
 public:
  CompositeTest(int n, double xi0, AltWeight weight, double alpha, const RngStream& rng,
                AuctionFormat format, int n_sim = kDefaultTestSims);
  double log_statistic(std::span<const double> prices) const;
  double log_statistic_normalized(std::span<const double> z) const;
  bool reject(double log_stat) const { return log_stat > log_critical_; }
  double p_value(double log_stat) const;  // fraction of null stats >= log_stat
  double log_critical() const { return log_critical_; }
  TestResult run(std::span<const double> prices) const;

 private:
  int n_;
  double xi0_;
  AltWeight weight_;
  double alpha_;
  AuctionFormat format_;
  std::uint64_t seed_;
  double log_critical_ = 0.0;
  std::vector<double> null_log_stats_;  // sorted
};

struct PowerCurvePoint {
  double xi = 0.0;
  int n = 0;
  double rejection_rate = 0.0;
  int reps = 0;
};

// Rejection frequency of the regularity test on simulated limit samples.
std::vector<PowerCurvePoint> power_curve(std::span<const double> xi_grid,
                                         std::span<const int> n_values, double alpha, int reps,
                                         const RngStream& rng,
                                         AuctionFormat format = AuctionFormat::second_price,
                                         int n_sim = kDefaultTestSims);

}  // namespace aevt
