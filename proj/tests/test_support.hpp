#pragma once

// Shared helpers for the test suites: small independent integration oracles
// and the weight-table cache used by inference/acceptance tests.

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "auctionevt/calibrate.hpp"
#include "auctionevt/quadrature.hpp"

namespace test {

// Gauss-Legendre on [0,1] built here so oracles do not share the library path.
inline double integrate_unit_interval(const std::function<double(double)>& f, int nodes) {
  const aevt::QuadratureRule gl = aevt::gauss_legendre(nodes);
  double sum = 0.0;
  for (std::size_t i = 0; i < gl.nodes.size(); ++i)
    sum += 0.5 * gl.weights[i] * f(0.5 * (gl.nodes[i] + 1.0));
  return sum;
}

// integral over {0 <= z1 <= z2 <= 1}
inline double integrate_ordered_square(const std::function<double(double, double)>& f,
                                       int nodes) {
  const aevt::QuadratureRule gl = aevt::gauss_legendre(nodes);
  double total = 0.0;
  for (std::size_t j = 0; j < gl.nodes.size(); ++j) {
    const double z2 = 0.5 * (gl.nodes[j] + 1.0);
    const double wj = 0.5 * gl.weights[j];
    double inner = 0.0;
    for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
      const double z1 = z2 * 0.5 * (gl.nodes[i] + 1.0);
      inner += 0.5 * gl.weights[i] * z2 * f(z1, z2);
    }
    total += wj * inner;
  }
  return total;
}

// trapezoid on a log-spaced grid over [lo, hi]
inline double integrate_log_grid(const std::function<double(double)>& f, double lo, double hi,
                                 int points) {
  const double step = std::log(hi / lo) / (points - 1);
  double sum = 0.0;
  double prev_y = lo, prev_f = f(lo);
  for (int k = 1; k < points; ++k) {
    const double y = lo * std::exp(k * step);
    const double fy = f(y);
    sum += 0.5 * (fy + prev_f) * (y - prev_y);
    prev_y = y;
    prev_f = fy;
  }
  return sum;
}

// adaptive Simpson, the independent quadrature oracle
inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double tol = 1e-10, int depth = 28) {
  struct Impl {
    const std::function<double(double)>& f;
    double recurse(double a, double b, double fa, double fm, double fb, double whole,
                   double tol, int depth) const {
      const double m = 0.5 * (a + b);
      const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
      const double flm = f(lm), frm = f(rm);
      const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
      const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
      if (depth <= 0 || std::fabs(left + right - whole) < 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
      return recurse(a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
             recurse(m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
    }
  } impl{f};
  const double m = 0.5 * (a + b);
  const double fa = f(a), fm = f(m), fb = f(b);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return impl.recurse(a, b, fa, fm, fb, whole, tol, depth);
}

// Weight tables are expensive to calibrate, so suites share a disk cache.
// Ships pre-calibrated under data/weights; recalibrated there if missing.
std::filesystem::path weights_dir();
const aevt::WeightTable& cached_table(aevt::CiTarget target, int n, double alpha = 0.05);

}  // namespace test
