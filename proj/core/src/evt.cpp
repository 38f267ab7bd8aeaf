#include "auctionevt/evt.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace aevt {

void require_xi_in_space(double xi) {
  if (!(xi >= kXiMin && xi <= kXiMax))
    throw std::domain_error("tail index outside [-1, 0.5]");
}

double h_transform(double x, double xi) {
  if (!(x > 0.0)) throw std::domain_error("h_transform: requires x > 0");
  if (std::fabs(xi) < kXiZeroTol) return -std::log(x);
  // expm1 keeps (x^{-xi} - 1)/xi cancellation-free for small xi
  return std::expm1(-xi * std::log(x)) / xi;
}

double gev_cdf(double x, double xi) {
  if (std::fabs(xi) < kXiZeroTol) return std::exp(-std::exp(-x));
  const double t = 1.0 + xi * x;
  if (t <= 0.0) return xi > 0.0 ? 0.0 : 1.0;
  return std::exp(-std::exp(-std::log1p(xi * x) / xi));
}

double second_order_cdf(double z, double xi) {
  // Z = H_xi(T), T ~ Gamma(2), H decreasing:  P(Z <= z) = P(T >= u) = (1+u)e^{-u}
  double u;
  if (std::fabs(xi) < kXiZeroTol) {
    u = std::exp(-z);
  } else {
    const double t = 1.0 + xi * z;
    if (t <= 0.0) return xi > 0.0 ? 0.0 : 1.0;
    u = std::exp(-std::log1p(xi * z) / xi);
  }
  return (1.0 + u) * std::exp(-u);
}

std::vector<double> sample_limit_prices(double xi, int n, LimitOrder order, RngStream& rng) {
  if (n < 1) throw std::invalid_argument("sample_limit_prices: requires n >= 1");
  std::vector<double> out(static_cast<std::size_t>(n));
  for (auto& v : out) {
    double t = rng.exponential();
    if (order == LimitOrder::second) t += rng.exponential();
    v = h_transform(t, xi);
  }
  return out;
}

NormalizedPrices normalize_prices(std::span<const double> prices) {
  if (prices.size() < 3) throw std::invalid_argument("need at least 3 transaction prices");
  for (double p : prices)
    if (!std::isfinite(p)) throw std::invalid_argument("non-finite transaction price");
  std::vector<double> sorted(prices.begin(), prices.end());
  std::stable_sort(sorted.begin(), sorted.end());
  NormalizedPrices out;
  out.min = sorted.front();
  out.range = sorted.back() - sorted.front();
  out.z.assign(sorted.size() - 2, 0.0);
  if (out.range > 0.0) {
    for (std::size_t j = 1; j + 1 < sorted.size(); ++j)
      out.z[j - 1] = (sorted[j] - out.min) / out.range;
  }
  return out;
}

std::vector<double> self_normalize(std::span<const double> prices) {
  return normalize_prices(prices).z;
}

bool in_simplex(std::span<const double> z) {
  double prev = 0.0;
  for (double v : z) {
    if (!(v >= prev)) return false;
    prev = v;
  }
  return prev <= 1.0;
}

}  // namespace aevt
