#pragma once

#include <span>

#include "auctionevt/evt.hpp"

namespace aevt {

struct DensityEvaluation {
  double value = 0.0;
  double log_value = 0.0;  // value == exp(log_value); log kept for large n
  double xi = 0.0;
};

// Joint limit density f_{Z~|xi}(z) of the sorted, self-normalized second-price
// vector, z in the ordered simplex with N = n-2 coordinates.  All sums run
// over the vector augmented with its normalized endpoints {0, 1}, so the
// integrand's log-sum has n terms.  Points violating the ordering give 0.
double log_density_znorm(std::span<const double> z, double xi);
DensityEvaluation density_znorm(std::span<const double> z, double xi);

// kappa_xi(z) f_{Z~|xi}(z), kappa the conditional expected range E[R | Z~ = z].
double log_kappa_density(std::span<const double> z, double xi);
double kappa_density(std::span<const double> z, double xi);

// Joint density of (Y_mu, Z~) at xi, Y_mu = Gamma(1-xi)/R; defined for y > 0.
double log_joint_density_ymu(double y, std::span<const double> z, double xi);
double joint_density_ymu(double y, std::span<const double> z, double xi);

// Joint density of (Y_pi, Z~) at xi, Y_pi = (E[Z] - Z_(1))/R; y != 0, any sign.
double log_joint_density_ypi(double y, std::span<const double> z, double xi);
double joint_density_ypi(double y, std::span<const double> z, double xi);

}  // namespace aevt
