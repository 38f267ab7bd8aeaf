#include "auctionevt/density_fp.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <stdexcept>
#include <vector>

#include "auctionevt/evt.hpp"
#include "auctionevt/quadrature.hpp"
#include "vecmath.hpp"
#include "auctionevt/special.hpp"

namespace aevt {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr int kQ = 200;
constexpr int kFitPoints = 50000;

struct UnitTemplate {
  double u[kQ];
  double w[kQ];
  double lnu[kQ];
  UnitTemplate();
};
UnitTemplate::UnitTemplate() {
  const QuadratureRule gl = gauss_legendre(kQ);
  for (int q = 0; q < kQ; ++q) {
    u[q] = 0.5 * (gl.nodes[q] + 1.0);
    w[q] = 0.5 * gl.weights[q];
    lnu[q] = detail::fast_log(u[q]);
  }
}
const UnitTemplate& unit_template() {
  static const UnitTemplate t;
  return t;
}

struct Scratch {
  std::vector<double> s, ws, lns, acc, lt, lng;
  void resize(int q) {
    s.resize(q);
    ws.resize(q);
    lns.resize(q);
    acc.resize(q);
    lt.resize(q);
    lng.resize(q);
  }
};

// raw views so gcc can prove no aliasing in the q-loops
struct ScratchView {
  double* __restrict s;
  double* __restrict ws;
  double* __restrict lns;
  double* __restrict acc;
  double* __restrict lt;
  double* __restrict lng;
  explicit ScratchView(Scratch& sc)
      : s(sc.s.data()), ws(sc.ws.data()), lns(sc.lns.data()), acc(sc.acc.data()),
        lt(sc.lt.data()), lng(sc.lng.data()) {}
};
Scratch& scratch() {
  thread_local Scratch sc;
  sc.resize(kQ);
  return sc;
}

inline double aug(std::span<const double> x, int i) {
  const int N = static_cast<int>(x.size());
  if (i == 0) return 0.0;
  if (i == N + 1) return 1.0;
  return x[static_cast<std::size_t>(i - 1)];
}

inline double reduce_log_integral(const ScratchView& sc) {
  // 4-lane max and weighted-exp sum so the reductions vectorize without
  // float reassociation
  double m0 = kNegInf, m1 = kNegInf, m2 = kNegInf, m3 = kNegInf;
  for (int q = 0; q < kQ; q += 4) {
    m0 = sc.lng[q] > m0 ? sc.lng[q] : m0;
    m1 = sc.lng[q + 1] > m1 ? sc.lng[q + 1] : m1;
    m2 = sc.lng[q + 2] > m2 ? sc.lng[q + 2] : m2;
    m3 = sc.lng[q + 3] > m3 ? sc.lng[q + 3] : m3;
  }
  const double m = std::max(std::max(m0, m1), std::max(m2, m3));
  if (!(m > kNegInf)) return kNegInf;
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  for (int q = 0; q < kQ; q += 4) {
    s0 += sc.ws[q] * detail::fast_exp(sc.lng[q] - m);
    s1 += sc.ws[q + 1] * detail::fast_exp(sc.lng[q + 1] - m);
    s2 += sc.ws[q + 2] * detail::fast_exp(sc.lng[q + 2] - m);
    s3 += sc.ws[q + 3] * detail::fast_exp(sc.lng[q + 3] - m);
  }
  const double sum = (s0 + s1) + (s2 + s3);
  return sum > 0.0 ? m + detail::fast_log(sum) : kNegInf;
}

RCoefficients fit_r_uncached(double xi) {
  const double xlo = -detail::fast_log1p(-1e-6);  // 1e-6 quantile of Exp(1)
  const double xhi = -detail::fast_log(1e-6);
  const double step = (xhi - xlo) / (kFitPoints - 1);
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  const bool zero = std::fabs(xi) < kXiZeroTol;
  for (int i = 0; i < kFitPoints; ++i) {
    const double x = xlo + step * i;
    const double lx = detail::fast_log(x);
    const double v = zero ? e_transform(x, 0.0)
                          : x + detail::fast_log(upper_incomplete_gamma(1.0 - xi, x));
    sx += lx;
    sy += v;
    sxx += lx * lx;
    sxy += lx * v;
    syy += v * v;
  }
  const double np = kFitPoints;
  const double slope = (np * sxy - sx * sy) / (np * sxx - sx * sx);
  const double intercept = (sy - slope * sx) / np;
  // residual RMSE without a second pass
  const double sse = syy - 2.0 * (intercept * sy + slope * sxy) + np * intercept * intercept +
                     2.0 * intercept * slope * sx + slope * slope * sxx;
  const double rmse = std::sqrt(std::max(sse, 0.0) / np);
  RCoefficients rc;
  rc.xi = xi;
  rc.fit_rmse = rmse;
  if (zero) {
    rc.r1 = 1.0 + slope;   // e_0(x) ~ (r1-1) ln x - r2
    rc.r2 = -intercept;
    rc.r3 = 0.0;
  } else {
    rc.r1 = -slope;
    rc.r2 = intercept;
    rc.r3 = detail::fast_exp(rc.r2 / rc.r1);
  }
  return rc;
}

const RCoefficients& fit_r_cached(double xi) {
  static std::mutex mu;
  static std::map<double, RCoefficients> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(xi);
  if (it == cache.end()) it = cache.emplace(xi, fit_r_uncached(xi)).first;
  return it->second;
}

void check_point(std::span<const double> x, double xi) {
  require_xi_in_space(xi);
  if (x.empty()) throw std::invalid_argument("simplex point needs N >= 1 (n >= 3)");
}

double log_fx_or_kfx(std::span<const double> x, double xi, bool with_kappa) {
  check_point(x, xi);
  if (!in_simplex(x)) return kNegInf;
  const int N = static_cast<int>(x.size());
  const int n = N + 2;
  const int spow = with_kappa ? N + 1 : N;
  const RCoefficients& rc = fit_r_cached(xi);
  const UnitTemplate& T_ = unit_template();
  const double* __restrict Tu = T_.u;
  const double* __restrict Tw = T_.w;
  const double* __restrict Tlnu = T_.lnu;
  Scratch& sc_storage = scratch();
  ScratchView sc(sc_storage);

  if (std::fabs(xi) < kXiZeroTol) {
    // affine-in-ln-E approximation: the X~ law is that of a Gumbel sample;
    // (1-r1) enters only through the kappa scale
    for (int q = 0; q < kQ; ++q) {
      const double omu = 1.0 - Tu[q];
      sc.s[q] = Tu[q] / omu;
      sc.ws[q] = Tw[q] / (omu * omu);
      sc.lns[q] = Tlnu[q] - detail::fast_log(omu);
    }
    double wsum = 1.0;
    for (int j = 0; j < N; ++j) wsum += x[j];
    for (int q = 0; q < kQ; ++q) sc.acc[q] = 1.0 + detail::fast_exp(-sc.s[q]);
    for (int j = 0; j < N; ++j) {
      const double xj = x[j];
      for (int q = 0; q < kQ; ++q) sc.acc[q] += detail::fast_exp(-xj * sc.s[q]);
    }
    for (int q = 0; q < kQ; ++q)
      sc.lng[q] = spow * sc.lns[q] - n * detail::fast_log(sc.acc[q]) - sc.s[q] * wsum;
    double pref = std::lgamma(n + 1.0) + std::lgamma(static_cast<double>(n));
    if (with_kappa) pref += detail::fast_log(1.0 - rc.r1);
    return pref + reduce_log_integral(sc);
  }

  if (xi < 0.0) {
    // cap at the decay scale so small |xi| keeps node resolution
    const double b = std::min(-1.0 / xi, 40.0 + 3.0 * n);
    const double lb = detail::fast_log(b);
    for (int q = 0; q < kQ; ++q) {
      sc.s[q] = b * Tu[q];
      sc.ws[q] = b * Tw[q];
      sc.lns[q] = lb + Tlnu[q];
    }
  } else {
    for (int q = 0; q < kQ; ++q) {
      const double omu = 1.0 - Tu[q];
      sc.s[q] = Tu[q] / omu;
      sc.ws[q] = Tw[q] / (omu * omu);
      sc.lns[q] = Tlnu[q] - detail::fast_log(omu);
    }
  }
  const double inv_r1 = 1.0 / rc.r1;
  const double c_sum = -(inv_r1 + 1.0);
  const double c_a = with_kappa ? (rc.r1 - n) : -static_cast<double>(n);
  for (int q = 0; q < kQ; ++q) {
    sc.acc[q] = 1.0;  // w = 0 endpoint
    sc.lng[q] = 0.0;
  }
  for (int j = 0; j <= N; ++j) {
    const double wj = (j < N) ? x[j] : 1.0;
    if (wj == 0.0) continue;
    const double cj = wj * xi;
    for (int q = 0; q < kQ; ++q) sc.lt[q] = detail::fast_log1p(cj * sc.s[q]);
    for (int q = 0; q < kQ; ++q) {
      sc.acc[q] += detail::fast_exp(-inv_r1 * sc.lt[q]);
      sc.lng[q] += sc.lt[q];
    }
  }
  for (int q = 0; q < kQ; ++q)
    sc.lng[q] = spow * sc.lns[q] + c_a * detail::fast_log(sc.acc[q]) + c_sum * sc.lng[q];
  double pref = std::lgamma(n + 1.0) + (n - 1.0) * detail::fast_log(std::fabs(xi / rc.r1));
  if (with_kappa)
    pref += std::lgamma(n - rc.r1) + rc.r1 * detail::fast_log(rc.r3);
  else
    pref += std::lgamma(static_cast<double>(n));
  return pref + reduce_log_integral(sc);
}

}  // namespace

double e_transform(double x, double xi) {
  if (!(x > 0.0)) throw std::domain_error("e_transform: requires x > 0");
  if (std::fabs(xi) < kXiZeroTol)
    return -detail::fast_log(x) - upper_incomplete_gamma_scaled_exp(0.0, x);
  return (upper_incomplete_gamma_scaled_exp(1.0 - xi, x) - 1.0) / xi;
}

RCoefficients fit_r_coefficients(double xi) {
  require_xi_in_space(xi);
  return fit_r_cached(xi);
}

double e_approx(double x, const RCoefficients& rc) {
  if (!(x > 0.0)) throw std::domain_error("e_approx: requires x > 0");
  if (std::fabs(rc.xi) < kXiZeroTol) return (rc.r1 - 1.0) * detail::fast_log(x) - rc.r2;
  return std::expm1(rc.r2 - rc.r1 * detail::fast_log(x)) / rc.xi;
}

double e_approx_inverse(double y, const RCoefficients& rc) {
  if (std::fabs(rc.xi) < kXiZeroTol) return detail::fast_exp((y + rc.r2) / (rc.r1 - 1.0));
  return rc.r3 * detail::fast_exp(-detail::fast_log1p(rc.xi * y) / rc.r1);
}

std::vector<double> sample_limit_prices_fp(double xi, int n, RngStream& rng) {
  if (n < 1) throw std::invalid_argument("sample_limit_prices_fp: requires n >= 1");
  std::vector<double> out(static_cast<std::size_t>(n));
  for (auto& v : out) v = e_transform(rng.exponential(), xi);
  return out;
}

double fp_winner_numerator(double xi) { return winner_gap_mean(xi); }

double fp_winner_numerator_mc(double xi, long draws, RngStream& rng) {
  double sum = 0.0;
  for (long i = 0; i < draws; ++i) {
    const double e = rng.exponential();
    sum += h_transform(e, xi) - e_transform(e, xi);
  }
  return sum / static_cast<double>(draws);
}

double fp_revenue_mean(double xi) { return revenue_mean(xi); }

double log_density_xnorm(std::span<const double> x, double xi) {
  return log_fx_or_kfx(x, xi, false);
}
double density_xnorm(std::span<const double> x, double xi) {
  return detail::fast_exp(log_density_xnorm(x, xi));
}
double log_kappa_density_fp(std::span<const double> x, double xi) {
  return log_fx_or_kfx(x, xi, true);
}
double kappa_density_fp(std::span<const double> x, double xi) {
  return detail::fast_exp(log_kappa_density_fp(x, xi));
}

double log_joint_density_ymu_fp(double y, std::span<const double> x, double xi) {
  check_point(x, xi);
  if (!(y > 0.0)) throw std::domain_error("joint_density_ymu_fp: requires y > 0");
  if (!in_simplex(x)) return kNegInf;
  const int N = static_cast<int>(x.size());
  const int n = N + 2;
  const double cmu = fp_winner_numerator(xi);
  const RCoefficients& rc = fit_r_cached(xi);
  Scratch& sc_storage = scratch();
  ScratchView sc(sc_storage);

  if (std::fabs(xi) < kXiZeroTol) {
    // closed form via the Gumbel-type approximate marginal
    const double beta = 1.0 / (1.0 - rc.r1);
    const double r = cmu / y;
    double a = 1.0 + detail::fast_exp(-beta * r);
    double wsum = 1.0;
    for (int j = 0; j < N; ++j) {
      a += detail::fast_exp(-beta * r * x[j]);
      wsum += x[j];
    }
    return std::lgamma(n + 1.0) + std::lgamma(static_cast<double>(n)) +
           (n - 1.0) * detail::fast_log(cmu) - n * detail::fast_log(y) + (n - 1.0) * detail::fast_log(beta) -
           beta * r * wsum - n * detail::fast_log(a);
  }

  // back-transformed frame v = (1 + xi s)^{-1/xi}, as in the sp counterpart;
  // here the w = 0 factor is exp(-r3 v^{xi/r1}), still an O(1)-scale cutoff
  const double c = cmu * xi / y;
  const double upper =
      std::max(50.0 + 3.0 * n, 1.2 * std::pow((50.0 + 3.0 * n) / rc.r3, rc.r1 / xi));
  double vmin = 0.0;
  if (xi < 0.0) {
    const double ln_vmin = detail::fast_log(-c) / (-xi);
    if (ln_vmin >= detail::fast_log(upper)) return kNegInf;
    vmin = detail::fast_exp(ln_vmin);
  }
  const UnitTemplate& T_ = unit_template();
  const double* __restrict Tu = T_.u;
  const double* __restrict Tw = T_.w;
  const double* __restrict Tlnu = T_.lnu;
  const double len = upper - vmin;
  for (int q = 0; q < kQ; ++q) {
    sc.s[q] = vmin + len * Tu[q];
    sc.ws[q] = len * Tw[q];
    sc.lns[q] = detail::fast_log(sc.s[q]);
  }
  const double inv_r1 = 1.0 / rc.r1;
  const double c_sum = -(inv_r1 + 1.0);
  for (int q = 0; q < kQ; ++q) {
    sc.lt[q] = detail::fast_exp(-xi * sc.lns[q]);  // v^{-xi}
    sc.acc[q] = 0.0;
    sc.lng[q] = 0.0;
  }
  for (int i = 0; i < n; ++i) {
    const double off = c * aug(x, i);
    for (int q = 0; q < kQ; ++q) {
      const double lt = detail::fast_log(std::max(sc.lt[q] + off, 1e-300));
      sc.acc[q] += detail::fast_exp(-inv_r1 * lt);
      sc.lng[q] += lt;
    }
  }
  for (int q = 0; q < kQ; ++q)
    sc.lng[q] = -rc.r3 * sc.acc[q] + c_sum * sc.lng[q] + (-xi - 1.0) * sc.lns[q];
  return std::lgamma(n + 1.0) + (n - 1.0) * detail::fast_log(cmu) - n * detail::fast_log(y) +
         n * detail::fast_log(std::fabs(xi * rc.r3 / rc.r1)) + reduce_log_integral(sc);
}

double joint_density_ymu_fp(double y, std::span<const double> x, double xi) {
  return detail::fast_exp(log_joint_density_ymu_fp(y, x, xi));
}

double log_joint_density_ypi_fp(double y, std::span<const double> x, double xi) {
  check_point(x, xi);
  if (!std::isfinite(y)) throw std::domain_error("joint_density_ypi_fp: requires finite y");
  if (!in_simplex(x)) return kNegInf;
  const int N = static_cast<int>(x.size());
  const int n = N + 2;
  const double pi = fp_revenue_mean(xi);
  const RCoefficients& rc = fit_r_cached(xi);
  const bool zero_branch = std::fabs(xi) < kXiZeroTol;
  Scratch& sc_storage = scratch();
  ScratchView sc(sc_storage);

  // range parametrization with a y-adaptive map scale, as in the sp counterpart
  const double spread = std::max({1.0, std::fabs(y), std::fabs(1.0 - y)});
  const double scale = 4.0 / spread;
  const UnitTemplate& T_ = unit_template();
  const double* __restrict Tu = T_.u;
  const double* __restrict Tw = T_.w;
  const double* __restrict Tlnu = T_.lnu;
  const double ln_scale = detail::fast_log(scale);
  for (int q = 0; q < kQ; ++q) {
    const double omu = 1.0 - Tu[q];
    sc.s[q] = scale * Tu[q] / omu;
    sc.ws[q] = scale * Tw[q] / (omu * omu);
    sc.lns[q] = ln_scale + Tlnu[q] - detail::fast_log(omu);
  }

  for (int q = 0; q < kQ; ++q) {
    sc.acc[q] = 0.0;
    sc.lng[q] = 0.0;
  }
  if (zero_branch) {
    const double beta = 1.0 / (1.0 - rc.r1);
    for (int i = 0; i < n; ++i) {
      const double ci = aug(x, i) - y;
      for (int q = 0; q < kQ; ++q) {
        const double arg = pi + ci * sc.s[q];
        sc.acc[q] += detail::fast_exp(-beta * (arg + rc.r2));
        sc.lng[q] += arg;
      }
    }
    for (int q = 0; q < kQ; ++q)
      sc.lng[q] = (N + 1.0) * sc.lns[q] - beta * (sc.lng[q] + n * rc.r2) - sc.acc[q];
    return std::lgamma(n + 1.0) + n * detail::fast_log(beta) + reduce_log_integral(sc);
  }
  const double inv_r1 = 1.0 / rc.r1;
  const double c_sum = -(inv_r1 + 1.0);
  const double a = 1.0 + xi * pi;
  for (int i = 0; i < n; ++i) {
    const double bi = xi * (aug(x, i) - y);
    for (int q = 0; q < kQ; ++q) sc.lt[q] = detail::fast_log(std::max(a + bi * sc.s[q], 1e-300));
    for (int q = 0; q < kQ; ++q) {
      sc.acc[q] += detail::fast_exp(-inv_r1 * sc.lt[q]);
      sc.lng[q] += sc.lt[q];
    }
  }
  for (int q = 0; q < kQ; ++q)
    sc.lng[q] = (N + 1.0) * sc.lns[q] - rc.r3 * sc.acc[q] + c_sum * sc.lng[q];
  return std::lgamma(n + 1.0) + n * detail::fast_log(std::fabs(xi * rc.r3 / rc.r1)) +
         reduce_log_integral(sc);
}

double joint_density_ypi_fp(double y, std::span<const double> x, double xi) {
  return detail::fast_exp(log_joint_density_ypi_fp(y, x, xi));
}

}  // namespace aevt
