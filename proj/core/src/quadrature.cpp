#include "auctionevt/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace aevt {

QuadratureRule gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n >= 1");
  QuadratureRule rule;
  rule.kind = QuadratureRule::Kind::finite_interval;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    // Newton from the Chebyshev-angle initial guess
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
      }
      dp = n * (x * p0 - p1) / (x * x - 1.0);
      const double dx = p0 / dp;
      x -= dx;
      if (std::fabs(dx) < 1e-15) break;
    }
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  return rule;
}

LaguerreRule gauss_laguerre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_laguerre: n >= 1");
  LaguerreRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  rule.total_weights.resize(n);
  double x = 0.0;
  for (int i = 0; i < n; ++i) {
    // initial guesses per Numerical Recipes (alpha = 0)
    if (i == 0) {
      x = 3.0 / (1.0 + 2.4 * n);
    } else if (i == 1) {
      x += 15.0 / (1.0 + 2.5 * n);
    } else {
      const double ai = i - 1;
      x += ((1.0 + 2.55 * ai) / (1.9 * ai)) * (x - rule.nodes[i - 2]);
    }
    double pp = 0.0;
    for (int it = 0; it < 200; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0 - x) * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (p0 - p1) / x;
      const double dx = p0 / pp;
      x -= dx;
      if (std::fabs(dx) < 1e-14 * (1.0 + x)) break;
    }
    rule.nodes[i] = x;
    double p1 = 1.0, p0 = 0.0;  // recompute L_{n}(x) pieces for the weight
    {
      double a0 = 1.0, a1 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double a2 = a1;
        a1 = a0;
        a0 = ((2.0 * j + 1.0 - x) * a1 - j * a2) / (j + 1.0);
      }
      p0 = a0;  // L_n(x)
      p1 = a1;  // L_{n-1}(x)
    }
    (void)p0;
    const double w = -1.0 / (pp * n * p1);
    rule.weights[i] = w;
    rule.total_weights[i] = std::exp(std::log(std::fabs(w)) + x) * (w < 0 ? -1.0 : 1.0);
  }
  return rule;
}

QuadratureRule semi_infinite_rule(int n) {
  const LaguerreRule lg = gauss_laguerre(n);
  QuadratureRule rule;
  rule.kind = QuadratureRule::Kind::semi_infinite;
  rule.nodes = lg.nodes;
  rule.weights = lg.total_weights;
  return rule;
}

double integrate_finite(const std::function<double(double)>& f, double a, double b,
                        const QuadratureRule& rule) {
  if (!(a < b)) throw std::domain_error("integrate_finite: requires a < b");
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double sum = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i)
    sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
  return half * sum;
}

double integrate_finite(const std::function<double(double)>& f, double a, double b, int nodes) {
  return integrate_finite(f, a, b, gauss_legendre(nodes));
}

double integrate_semi_infinite(const std::function<double(double)>& f, const LaguerreRule& rule) {
  double sum = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i)
    sum += rule.total_weights[i] * f(rule.nodes[i]);
  return sum;
}

double integrate_semi_infinite(const std::function<double(double)>& f,
                               SemiInfiniteStrategy strategy, int nodes) {
  if (strategy == SemiInfiniteStrategy::laguerre)
    return integrate_semi_infinite(f, gauss_laguerre(nodes));
  // s = t/(1-t): int_0^inf f(s) ds = int_0^1 f(t/(1-t)) (1-t)^{-2} dt
  const QuadratureRule gl = gauss_legendre(nodes);
  double sum = 0.0;
  for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
    const double t = 0.5 * (gl.nodes[i] + 1.0);
    const double omt = 1.0 - t;
    sum += 0.5 * gl.weights[i] * f(t / omt) / (omt * omt);
  }
  return sum;
}

}  // namespace aevt
