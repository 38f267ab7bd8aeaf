#pragma once

namespace aevt {

inline constexpr double kEulerGamma = 0.57721566490153286061;

// Upper incomplete gamma Gamma(a, x) = int_x^inf u^{a-1} e^{-u} du.
// Supports a in [-1.5, 2] (and generally a <= 2), x > 0.
// Relative accuracy ~1e-12 on that range; throws std::domain_error for x <= 0.
double upper_incomplete_gamma(double a, double x);

// exp(x) * Gamma(a, x), computed without overflow for large x.
double upper_incomplete_gamma_scaled_exp(double a, double x);

// E[Z1 - Z2] = Gamma(1 - xi) for Z1 = H_xi(E1), Z2 = H_xi(E1+E2).  Needs xi < 1.
double winner_gap_mean(double xi);

// E[Z2] = (Gamma(2 - xi) - 1)/xi, continuous at xi = 0 where it equals
// EulerGamma - 1.  Needs xi < 1.
double revenue_mean(double xi);

// Regularized incomplete beta I_x(a, b), for the Student-t CDF.
double regularized_incomplete_beta(double a, double b, double x);

// Standard normal quantile (Acklam's rational approximation + one Halley step).
double inverse_normal_cdf(double p);

}  // namespace aevt
