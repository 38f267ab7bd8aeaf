#pragma once

#include <functional>
#include <vector>

namespace aevt {

struct QuadratureRule {
  enum class Kind { finite_interval, semi_infinite };
  std::vector<double> nodes;
  std::vector<double> weights;
  Kind kind = Kind::finite_interval;
};

// Gauss-Legendre rule on (-1, 1).
QuadratureRule gauss_legendre(int n);

// Gauss-Laguerre rule for int_0^inf f(x) e^{-x} dx ~= sum w_i f(x_i).
// total_weights holds w_i e^{x_i} so int_0^inf g = sum total_w_i g(x_i).
struct LaguerreRule {
  std::vector<double> nodes;
  std::vector<double> weights;        // against the e^{-x} weight
  std::vector<double> total_weights;  // against Lebesgue measure
};
LaguerreRule gauss_laguerre(int n);

QuadratureRule semi_infinite_rule(int n);  // Laguerre, packaged as a rule

inline constexpr int kDefaultFiniteNodes = 200;
inline constexpr int kDefaultSemiInfiniteNodes = 100;

// Gauss-Legendre estimate of int_a^b f; throws std::domain_error if a >= b.
double integrate_finite(const std::function<double(double)>& f, double a, double b,
                        const QuadratureRule& rule);
double integrate_finite(const std::function<double(double)>& f, double a, double b,
                        int nodes = kDefaultFiniteNodes);

// int_0^inf f for exponentially decaying f.  strategy "laguerre" uses the
// Gauss-Laguerre rule with the e^{-x} weight factored out; "mapped" substitutes
// s = t/(1-t) and integrates over (0,1) with Gauss-Legendre.
enum class SemiInfiniteStrategy { laguerre, mapped };
double integrate_semi_infinite(const std::function<double(double)>& f,
                               const LaguerreRule& rule);
double integrate_semi_infinite(const std::function<double(double)>& f,
                               SemiInfiniteStrategy strategy = SemiInfiniteStrategy::laguerre,
                               int nodes = kDefaultSemiInfiniteNodes);

}  // namespace aevt
