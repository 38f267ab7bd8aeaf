#pragma once

#include <span>
#include <vector>

#include "auctionevt/rng.hpp"

namespace aevt {

// First-price limit transform X = e_xi(E), E ~ Exp(1):
//   e_xi(x) = [exp(x) Gamma(1-xi, x) - 1]/xi          (xi != 0)
//   e_0(x)  = -ln x - exp(x) Gamma(0, x)
// Decreasing in x for every xi in the parameter space.
double e_transform(double x, double xi);

// OLS fit of ln(exp(x) Gamma(1-xi, x)) on {1, ln x} over 50,000 equally
// spaced x between the 1e-6 and 1-1e-6 quantiles of Exp(1); r1 = -slope,
// r2 = intercept, r3 = exp(r2/r1).  At xi = 0 the regressand degenerates and
// the fit is of e_0(x) itself on {1, ln x}, restoring the (r1-1)*ln x - r2
// form used by the xi = 0 branches below.
struct RCoefficients {
  double r1 = 0.0;
  double r2 = 0.0;
  double r3 = 0.0;  // exp(r2/r1); unused (and 0) at xi = 0
  double xi = 0.0;
  double fit_rmse = 0.0;
};
RCoefficients fit_r_coefficients(double xi);

// closed-form approximate transform and inverse implied by the fit
double e_approx(double x, const RCoefficients& rc);
double e_approx_inverse(double y, const RCoefficients& rc);

// n i.i.d. first-price limit draws e_xi(E_j) (exact transform).
std::vector<double> sample_limit_prices_fp(double xi, int n, RngStream& rng);

// Winner numerator constant c_mu(xi) = E[H_xi(E) - e_xi(E)]: equals
// Gamma(1-xi) exactly (limit revenue equivalence); a Monte Carlo estimate is
// provided so the identity stays checkable.
double fp_winner_numerator(double xi);
double fp_winner_numerator_mc(double xi, long draws, RngStream& rng);
// E[e_xi(E)] = (Gamma(2-xi)-1)/xi, identical to the second-price revenue mean.
double fp_revenue_mean(double xi);

// Approximate fp analogs of the sp densities (r-fit based), log domain.
double log_density_xnorm(std::span<const double> x, double xi);
double density_xnorm(std::span<const double> x, double xi);
double log_kappa_density_fp(std::span<const double> x, double xi);
double kappa_density_fp(std::span<const double> x, double xi);
double log_joint_density_ymu_fp(double y, std::span<const double> x, double xi);
double joint_density_ymu_fp(double y, std::span<const double> x, double xi);
double log_joint_density_ypi_fp(double y, std::span<const double> x, double xi);
double joint_density_ypi_fp(double y, std::span<const double> x, double xi);

}  // namespace aevt
