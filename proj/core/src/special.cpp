#include "auctionevt/special.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace aevt {
namespace {

// regularized lower series: P(a,x) * Gamma(a) = gamma(a,x), for a > 0, x < a+1
double lower_gamma_series(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  for (int k = 1; k < 500; ++k) {
    term *= x / (a + k);
    sum += term;
    if (std::fabs(term) < std::fabs(sum) * 1e-17) break;
  }
  return sum * std::exp(-x + a * std::log(x));
}

// continued fraction for Gamma(a,x)*exp(x)*x^{-a}, valid for x >= a+1 (Lentz)
double upper_gamma_cf(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 500; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < 1e-16) break;
  }
  return h;
}

// E1(x) for 0 < x <= 1 via the classic series
double exp1_series(double x) {
  double sum = -kEulerGamma - std::log(x);
  double term = 1.0;
  for (int k = 1; k < 80; ++k) {
    term *= -x / k;
    sum -= term / k;
    if (std::fabs(term / k) < std::fabs(sum) * 1e-17 + 1e-300) break;
  }
  return sum;
}

// core: Gamma(a,x) for a >= 0 (and the exp(x)-scaled variant)
double upper_gamma_nonneg(double a, double x, bool scaled) {
  if (a == 0.0) {
    if (x <= 1.0) {
      const double e1 = exp1_series(x);
      return scaled ? e1 * std::exp(x) : e1;
    }
    const double cf = upper_gamma_cf(0.0, x);
    return scaled ? cf : cf * std::exp(-x);
  }
  if (x < a + 1.0) {
    const double g = std::tgamma(a) - lower_gamma_series(a, x);
    return scaled ? g * std::exp(x) : g;
  }
  const double cf = upper_gamma_cf(a, x) * std::pow(x, a);
  return scaled ? cf : cf * std::exp(-x);
}

double upper_gamma_impl(double a, double x, bool scaled) {
  if (!(x > 0.0)) throw std::domain_error("upper_incomplete_gamma: requires x > 0");
  if (a > 2.0 + 1e-12) throw std::domain_error("upper_incomplete_gamma: a > 2 unsupported");
  if (a >= 0.0) return upper_gamma_nonneg(a, x, scaled);
  // a < 0: downward recurrence Gamma(a,x) = (Gamma(a+1,x) - x^a e^{-x}) / a,
  // peeled until the base argument is nonnegative (at most two steps here)
  int steps = 0;
  double abase = a;
  while (abase < 0.0) {
    abase += 1.0;
    ++steps;
  }
  double g = upper_gamma_nonneg(abase, x, scaled);
  double aa = abase;
  for (int k = 0; k < steps; ++k) {
    aa -= 1.0;
    const double power = scaled ? std::pow(x, aa) : std::exp(aa * std::log(x) - x);
    g = (g - power) / aa;
  }
  return g;
}

}  // namespace

double upper_incomplete_gamma(double a, double x) { return upper_gamma_impl(a, x, false); }

double upper_incomplete_gamma_scaled_exp(double a, double x) {
  return upper_gamma_impl(a, x, true);
}

double winner_gap_mean(double xi) {
  if (!(xi < 1.0)) throw std::domain_error("winner_gap_mean: requires xi < 1");
  return std::tgamma(1.0 - xi);
}

double revenue_mean(double xi) {
  if (!(xi < 1.0)) throw std::domain_error("revenue_mean: requires xi < 1");
  if (std::fabs(xi) < 1e-6) return kEulerGamma - 1.0;
  return (std::tgamma(2.0 - xi) - 1.0) / xi;
}

namespace {

double incbeta_cf(double a, double b, double x) {
  // Lentz's continued fraction for I_x(a,b), converges fast for x < (a+1)/(a+b+2)
  const double tiny = 1e-300;
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0, d = 1.0 - qab * x / qap;
  if (std::fabs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 300; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < 1e-15) break;
  }
  return h;
}

}  // namespace

double regularized_incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0 && b > 0.0)) throw std::domain_error("incomplete beta: requires a, b > 0");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                          a * std::log(x) + b * std::log1p(-x);
  if (x < (a + 1.0) / (a + b + 2.0))
    return std::exp(ln_front) * incbeta_cf(a, b, x) / a;
  return 1.0 - std::exp(ln_front) * incbeta_cf(b, a, 1.0 - x) / b;
}

double inverse_normal_cdf(double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::domain_error("inverse_normal_cdf: requires 0 < p < 1");
  // Acklam's approximation
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425, phigh = 1.0 - plow;
  double x;
  if (p < plow) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= phigh) {
    const double q = p - 0.5, r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  // one Halley refinement against the exact CDF
  const double e = 0.5 * std::erfc(-x / std::sqrt(2.0)) - p;
  const double u = e * std::sqrt(2.0 * M_PI) * std::exp(0.5 * x * x);
  x -= u / (1.0 + 0.5 * x * u);
  return x;
}

}  // namespace aevt
