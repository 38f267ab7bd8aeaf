#pragma once

// Shared plumbing between calibration and the CI/test rule evaluation:
// density dispatch by auction format and the W-averaged left-hand side of
// the interval-set inequality.

#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "auctionevt/calibrate.hpp"
#include "auctionevt/density_fp.hpp"
#include "auctionevt/density_sp.hpp"
#include "auctionevt/evt.hpp"
#include "auctionevt/special.hpp"

namespace aevt::detail {

inline double log_f_dispatch(std::span<const double> z, double xi, bool fp) {
  return fp ? log_density_xnorm(z, xi) : log_density_znorm(z, xi);
}

inline double log_kf_dispatch(std::span<const double> z, double xi, bool fp) {
  return fp ? log_kappa_density_fp(z, xi) : log_kappa_density(z, xi);
}

inline double log_fy_dispatch(double y, std::span<const double> z, double xi, CiTarget target) {
  switch (target) {
    case CiTarget::winner_sp: return log_joint_density_ymu(y, z, xi);
    case CiTarget::seller_sp: return log_joint_density_ypi(y, z, xi);
    case CiTarget::winner_fp: return log_joint_density_ymu_fp(y, z, xi);
    case CiTarget::seller_fp: return log_joint_density_ypi_fp(y, z, xi);
  }
  return -std::numeric_limits<double>::infinity();
}

// normalized target quantity whose coverage the CI controls
inline double target_y(CiTarget target, double xi, double sample_min, double sample_range) {
  if (is_winner(target)) return winner_gap_mean(xi) / sample_range;
  return (revenue_mean(xi) - sample_min) / sample_range;
}

inline std::vector<double> sample_prices_dispatch(bool fp, double xi, int n, RngStream& rng) {
  return fp ? sample_limit_prices_fp(xi, n, rng)
            : sample_limit_prices(xi, n, LimitOrder::second, rng);
}

// LHS of the set rule: int kappa_xi f dW(xi) with W uniform, discretized on
// the same grid as Lambda; log domain.
inline double log_lhs_w_average(std::span<const double> z, std::span<const double> grid,
                                bool fp) {
  double m = -std::numeric_limits<double>::infinity();
  std::vector<double> vals(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    vals[i] = log_kf_dispatch(z, grid[i], fp);
    if (vals[i] > m) m = vals[i];
  }
  if (!(m > -std::numeric_limits<double>::infinity())) return m;
  double sum = 0.0;
  for (double v : vals) sum += std::exp(v - m);
  return m + std::log(sum / static_cast<double>(grid.size()));
}

// RHS at y: log sum_m lambda_m f_Y(y, z | xi_m)
inline double log_rhs_lambda(double y, std::span<const double> z, const WeightTable& table) {
  double m = -std::numeric_limits<double>::infinity();
  std::vector<double> vals;
  vals.reserve(table.grid.size());
  std::vector<double> lw;
  lw.reserve(table.grid.size());
  for (std::size_t i = 0; i < table.grid.size(); ++i) {
    if (table.weights[i] <= 0.0) continue;
    const double v = log_fy_dispatch(y, z, table.grid[i], table.target);
    vals.push_back(v);
    lw.push_back(std::log(table.weights[i]));
    if (v + lw.back() > m) m = v + lw.back();
  }
  if (vals.empty() || !(m > -std::numeric_limits<double>::infinity()))
    return -std::numeric_limits<double>::infinity();
  double sum = 0.0;
  for (std::size_t i = 0; i < vals.size(); ++i) sum += std::exp(vals[i] + lw[i] - m);
  return m + std::log(sum);
}

}  // namespace aevt::detail
