#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "auctionevt/evt.hpp"
#include "auctionevt/rng.hpp"

namespace aevt {

enum class CiTarget { winner_sp, seller_sp, winner_fp, seller_fp };

const char* to_string(CiTarget t);
CiTarget ci_target_from_string(const std::string& s);
bool is_first_price(CiTarget t);
bool is_winner(CiTarget t);

struct CalibrationConfig {
  int grid_size = 50;      // M
  int draws = 10000;       // B
  int iterations = 2000;   // S
  double step = 0.05;      // epsilon
  std::uint64_t seed = 1;
  double xi_lo = kXiMin;
  double xi_hi = kXiMax;
};

// Lagrange weights over the xi grid, the reusable artifact of calibration.
struct WeightTable {
  int format_version = 1;
  CiTarget target = CiTarget::winner_sp;
  int n = 0;
  double alpha = 0.05;
  CalibrationConfig config;
  std::vector<double> grid;     // strictly increasing within [-1, 0.5]
  std::vector<double> weights;  // lambda_m >= 0
  std::vector<double> c_mu;     // winner numerator Gamma(1-xi_m) cache
  std::string id() const;       // content checksum, echoed in results

  // piecewise-linear interpolation of lambda over Xi, clamped at the ends
  double lambda_at(double xi) const;
};

// grid used by calibration and by the W-average in the CI rule:
// left endpoints of M equal subintervals of [xi_lo, xi_hi]
std::vector<double> make_xi_grid(int M, double xi_lo = kXiMin, double xi_hi = kXiMax);

// Runs the iterative least-favorable-weight search (uniform init; B simulated
// limit samples per grid point with common random numbers across iterations;
// lambda_m <- max(0, lambda_m + eps((1-P_m) - alpha))).  Throws
// CalibrationFailure with a per-point report if any grid point's coverage
// ends below 1 - alpha - 0.02.
WeightTable calibrate_weights(CiTarget target, int n, double alpha,
                              const CalibrationConfig& cfg, bool verbose = false);

struct CalibrationFailure : std::runtime_error {
  explicit CalibrationFailure(const std::string& what, std::vector<double> coverage_report)
      : std::runtime_error(what), coverage(std::move(coverage_report)) {}
  std::vector<double> coverage;
};

// Fraction of B fresh simulated limit samples whose target quantity lands in
// the weighted-density interval set.
double coverage_estimate(const WeightTable& table, double xi, int B, RngStream& rng);

// coverage_estimate at every grid point (fresh draws, one pass)
std::vector<double> coverage_audit(const WeightTable& table, int B, const RngStream& rng);

// Self-describing JSON, doubles round-trip bit-exactly, FNV-1a checksum.
void save_table(const WeightTable& table, const std::filesystem::path& path);
WeightTable load_table(const std::filesystem::path& path);

// validates a loaded table against the requested use; throws on mismatch
void require_table_matches(const WeightTable& table, CiTarget target, int n, double alpha);

}  // namespace aevt
