#pragma once

// Branchless double-precision exp/log for the density quadrature loops.
// Pure arithmetic (no libm calls), so the q-loops auto-vectorize; accuracy is
// a few ulp, far below the quadrature tolerances.  Classic Cephes-style
// reductions: exp by 2^n * P/Q rational on the ln2 remainder, log by
// mantissa/exponent split and a rational on the symmetric interval.

#include <bit>
#include <cstdint>

namespace aevt::detail {

inline double fast_exp(double x) {
  // clamp: below -745 the result underflows to 0; above 709 it saturates to
  // a huge finite value (callers only feed +big when the term is discarded)
  const double xc = x < -745.0 ? -745.0 : (x > 709.0 ? 709.0 : x);
  const double log2e = 1.4426950408889634074;
  const double c1 = 6.93145751953125e-1;  // ln2 split
  const double c2 = 1.42860682030941723212e-6;
  const double n = __builtin_rint(xc * log2e);
  const double r = (xc - n * c1) - n * c2;
  const double rr = r * r;
  // Cephes exp P/Q coefficients
  double px = 1.26177193074810590878e-4;
  px = px * rr + 3.02994407707441961300e-2;
  px = px * rr + 9.99999999999999999910e-1;
  px *= r;
  double qx = 3.00198505138664455042e-6;
  qx = qx * rr + 2.52448340349684104192e-3;
  qx = qx * rr + 2.27265548208155028766e-1;
  qx = qx * rr + 2.00000000000000000005e0;
  double res = 1.0 + 2.0 * px / (qx - px);
  // scale by 2^n through exponent bits, split into two halves so the clamped
  // range |n| <= 1075 never over/underflows either factor (branchless)
  const long long ni = static_cast<long long>(n);
  const long long half = ni / 2;
  res *= std::bit_cast<double>(static_cast<std::uint64_t>(1023 + half) << 52);
  res *= std::bit_cast<double>(static_cast<std::uint64_t>(1023 + (ni - half)) << 52);
  return x < -745.0 ? 0.0 : res;
}

inline double fast_log(double x) {
  // callers guarantee x >= 1e-300 (clamped), finite
  const std::uint64_t bits = std::bit_cast<std::uint64_t>(x);
  int e = static_cast<int>(bits >> 52) - 1022;
  double m = std::bit_cast<double>((bits & 0x000fffffffffffffULL) | 0x3fe0000000000000ULL);
  // m in [0.5, 1); renormalize to [sqrt(1/2), sqrt(2))
  const bool low = m < 0.70710678118654752440;
  m = low ? 2.0 * m : m;
  e = low ? e - 1 : e;
  const double z = m - 1.0;
  // Cephes log rational approximation on z
  double px = 1.01875663804580931796e-4;
  px = px * z + 4.97494994976747001425e-1;
  px = px * z + 4.70579119878881725854e0;
  px = px * z + 1.44989225341610930846e1;
  px = px * z + 1.79368678507819816313e1;
  px = px * z + 7.70838733755885391666e0;
  double qx = z + 1.12873587189167450590e1;
  qx = qx * z + 4.52279145837532221105e1;
  qx = qx * z + 8.29875266912776603211e1;
  qx = qx * z + 7.11544750618563894466e1;
  qx = qx * z + 2.31251620126765340583e1;
  const double zz = z * z;
  double y = z * (zz * px / qx) - 0.5 * zz;
  const double c1 = 6.93145751953125e-1;
  const double c2 = 1.42860682030941723212e-6;
  return e * c2 + (y + z) + e * c1;
}

inline double fast_log1p(double y) {
  const double u = 1.0 + y;
  const double d = u - 1.0;  // exact
  // log(u) plus the first-order correction for the rounding of 1+y
  const double corr = u > 0.0 ? (y - d) / u : 0.0;
  return u == 1.0 ? y : fast_log(u) + corr;
}

}  // namespace aevt::detail
