#pragma once

#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "pvi/ext_real.hpp"

namespace pvi {

// Catalogue of proper convex l.s.c. scalar functions with phi >= phi(0) = 0.

struct ZeroFunction {};

// Indicator of [a, +inf), a <= 0.
struct HalfLineLower {
  double a;
};

// Indicator of (-inf, b], b >= 0.
struct HalfLineUpper {
  double b;
};

// Indicator of [a, b], a <= 0 <= b.
struct IntervalIndicator {
  double a;
  double b;
};

// c * y^2
struct Quadratic {
  double c;
};

// c * |y|^p, p >= 1
struct AbsPower {
  double c;
  double p;
};

// Continuous piecewise-linear function with phi(0) = 0. `slopes` has one more
// entry than `breakpoints`; slopes[i] applies on (breakpoints[i-1], breakpoints[i]).
struct PiecewiseLinearConvex {
  std::vector<double> breakpoints;
  std::vector<double> slopes;
};

struct ProxResult {
  double resolvent_point;  // J_eps(y)
  double yosida_value;     // (y - J_eps(y)) / eps
  double envelope_value;   // Moreau envelope at y
};

class ConvexFunction {
 public:
  using Variant = std::variant<ZeroFunction, HalfLineLower, HalfLineUpper, IntervalIndicator,
                               Quadratic, AbsPower, PiecewiseLinearConvex>;

  ConvexFunction() = default;
  // Throws DomainError when the variant breaks phi(y) >= phi(0) = 0 or convexity.
  explicit ConvexFunction(Variant v);

  static ConvexFunction zero() { return ConvexFunction(ZeroFunction{}); }
  static ConvexFunction half_line_lower(double a) { return ConvexFunction(HalfLineLower{a}); }
  static ConvexFunction half_line_upper(double b) { return ConvexFunction(HalfLineUpper{b}); }
  static ConvexFunction interval(double a, double b) {
    return ConvexFunction(IntervalIndicator{a, b});
  }
  static ConvexFunction quadratic(double c) { return ConvexFunction(Quadratic{c}); }
  static ConvexFunction abs_power(double c, double p) { return ConvexFunction(AbsPower{c, p}); }
  static ConvexFunction piecewise_linear(std::vector<double> breakpoints,
                                         std::vector<double> slopes) {
    return ConvexFunction(PiecewiseLinearConvex{std::move(breakpoints), std::move(slopes)});
  }

  const Variant& variant() const { return v_; }
  bool is_zero() const { return std::holds_alternative<ZeroFunction>(v_); }
  bool is_indicator() const;

  // phi(y); +inf exactly when y is outside Dom(phi).
  ExtReal evaluate(double y) const;

  // (phi'_-(y), phi'_+(y)). Throws DomainError outside Dom(phi).
  std::pair<ExtReal, ExtReal> one_sided_derivatives(double y) const;

  // Closure of Dom(phi) as [lower, upper].
  std::pair<ExtReal, ExtReal> domain() const;

  bool in_domain(double y) const { return evaluate(y).is_finite(); }

  // J_eps(y) = (I + eps d phi)^{-1}(y). Closed form for every variant except
  // AbsPower with p not in {1, 2}, which uses safeguarded Newton.
  double resolvent(double eps, double y) const;
  double yosida(double eps, double y) const { return (y - resolvent(eps, y)) / eps; }
  ProxResult prox(double eps, double y) const;

  // Unique y with y + h * yosida(eps, y) = v, through the identity
  // y = (eps * v + h * J_{eps+h}(v)) / (eps + h).
  double backward_prox_step(double eps, double h, double v) const;

  std::string describe() const;

 private:
  Variant v_{ZeroFunction{}};
  // Values at breakpoints for PiecewiseLinearConvex.
  std::vector<double> pl_values_;
};

// Same equation as backward_prox_step, solved by monotone bisection. Reference
// route for tests and fallback when the identity cannot be trusted.
double backward_prox_step_bisection(const ConvexFunction& f, double eps, double h, double v);

}  // namespace pvi
