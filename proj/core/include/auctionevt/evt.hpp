#pragma once

#include <span>
#include <vector>

#include "auctionevt/rng.hpp"

namespace aevt {

// Parameter space for the tail index xi.
inline constexpr double kXiMin = -1.0;
inline constexpr double kXiMax = 0.5;
// |xi| below this uses the xi = 0 formulas throughout.
inline constexpr double kXiZeroTol = 1e-6;

void require_xi_in_space(double xi);  // throws std::domain_error outside [-1, 0.5]

// H_xi(x) = (x^{-xi} - 1)/xi for xi != 0, -ln x at xi = 0; maps Exp(1) draws
// to the generalized EV law:  G_xi(H_xi(t)) = exp(-t).
double h_transform(double x, double xi);

// Generalized EV CDF (Weibull / Gumbel / Frechet unified).
double gev_cdf(double x, double xi);

// CDF of the second-order limit variate H_xi(E1+E2): Gamma(2) survival at
// the back-transformed argument.
double second_order_cdf(double z, double xi);

enum class LimitOrder { first, second };

// n i.i.d. draws of H_xi(E1) (first) or H_xi(E1+E2) (second).
std::vector<double> sample_limit_prices(double xi, int n, LimitOrder order, RngStream& rng);

// Sorted, self-normalized prices: z_j = (P_(j+1) - P_(1))/(P_(n) - P_(1)),
// j = 1..n-2; all-zero when the sample is degenerate (P_(n) = P_(1)).
struct NormalizedPrices {
  std::vector<double> z;  // simplex coordinates, length n-2
  double min = 0.0;       // P_(1)
  double range = 0.0;     // P_(n) - P_(1)
};
NormalizedPrices normalize_prices(std::span<const double> prices);
std::vector<double> self_normalize(std::span<const double> prices);

// true iff 0 <= z_1 <= ... <= z_N <= 1
bool in_simplex(std::span<const double> z);

}  // namespace aevt
