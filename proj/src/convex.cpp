#include "pvi/convex.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pvi/errors.hpp"

namespace pvi {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

constexpr int kMaxIter = 200;

void require(bool ok, const std::string& what) {
  if (!ok) throw DomainError("invalid convex function: " + what);
}

bool finite(double x) { return std::isfinite(x); }

// Root of w + k * w^(p-1) = r on [0, r], r >= 0, k > 0, p > 1.
double abs_power_root(double k, double p, double r) {
  if (r == 0.0) return 0.0;
  auto q = [&](double w) { return w + k * std::pow(w, p - 1.0) - r; };
  double lo = 0.0;
  double hi = r;
  double w = r / (1.0 + k * p);
  // Run Newton to machine precision: callers divide J by eps, so a residual
  // tolerance here would be amplified by 1 / eps downstream.
  for (int it = 0; it < kMaxIter; ++it) {
    const double val = q(w);
    if (val == 0.0) return w;
    if (val > 0.0) {
      hi = w;
    } else {
      lo = w;
    }
    double next = w;
    const double dq = 1.0 + k * (p - 1.0) * std::pow(w, p - 2.0);
    if (w > 0.0 && std::isfinite(dq) && dq > 0.0) next = w - val / dq;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (next == lo || next == hi) return next;  // bracket collapsed to adjacent doubles
    if (std::abs(next - w) <= 0x1.0p-52 * w) return next;
    w = next;
  }
  throw ConvergenceError("abs_power resolvent did not converge within 200 iterations");
}

}  // namespace

ConvexFunction::ConvexFunction(Variant v) : v_(std::move(v)) {
  std::visit(overloaded{
                 [](const ZeroFunction&) {},
                 [](const HalfLineLower& f) { require(finite(f.a) && f.a <= 0.0, "half_line_lower needs a <= 0"); },
                 [](const HalfLineUpper& f) { require(finite(f.b) && f.b >= 0.0, "half_line_upper needs b >= 0"); },
                 [](const IntervalIndicator& f) {
                   require(finite(f.a) && finite(f.b) && f.a <= 0.0 && 0.0 <= f.b,
                           "interval needs a <= 0 <= b");
                 },
                 [](const Quadratic& f) { require(finite(f.c) && f.c >= 0.0, "quadratic needs c >= 0"); },
                 [](const AbsPower& f) {
                   require(finite(f.c) && f.c >= 0.0, "abs_power needs c >= 0");
                   require(finite(f.p) && f.p >= 1.0, "abs_power needs p >= 1");
                 },
                 [](const PiecewiseLinearConvex&) {},
             },
             v_);

  if (auto* pl = std::get_if<PiecewiseLinearConvex>(&v_)) {
    const auto& bp = pl->breakpoints;
    const auto& s = pl->slopes;
    require(s.size() == bp.size() + 1, "piecewise_linear needs slopes.size() == breakpoints.size() + 1");
    for (double x : bp) require(finite(x), "piecewise_linear breakpoints must be finite");
    for (double x : s) require(finite(x), "piecewise_linear slopes must be finite");
    for (std::size_t i = 1; i < bp.size(); ++i) require(bp[i - 1] < bp[i], "breakpoints must increase strictly");
    for (std::size_t i = 1; i < s.size(); ++i) require(s[i - 1] <= s[i], "slopes must be nondecreasing");

    // 0 must lie in the subdifferential at 0.
    const auto right_seg = static_cast<std::size_t>(std::upper_bound(bp.begin(), bp.end(), 0.0) - bp.begin());
    const auto left_seg = static_cast<std::size_t>(std::lower_bound(bp.begin(), bp.end(), 0.0) - bp.begin());
    require(s[left_seg] <= 0.0 && s[right_seg] >= 0.0, "0 must be a subgradient at 0");

    // Integrate outward from 0.
    pl_values_.assign(bp.size(), 0.0);
    for (std::size_t i = right_seg; i < bp.size(); ++i) {
      const double start = (i == right_seg) ? 0.0 : bp[i - 1];
      const double base = (i == right_seg) ? 0.0 : pl_values_[i - 1];
      pl_values_[i] = base + s[i] * (bp[i] - start);
    }
    for (std::size_t j = left_seg; j-- > 0;) {
      const double end = (j + 1 == left_seg) ? 0.0 : bp[j + 1];
      const double base = (j + 1 == left_seg) ? 0.0 : pl_values_[j + 1];
      pl_values_[j] = base - s[j + 1] * (end - bp[j]);
    }
  }
}

bool ConvexFunction::is_indicator() const {
  return std::holds_alternative<HalfLineLower>(v_) || std::holds_alternative<HalfLineUpper>(v_) ||
         std::holds_alternative<IntervalIndicator>(v_);
}

ExtReal ConvexFunction::evaluate(double y) const {
  return std::visit(
      overloaded{
          [](const ZeroFunction&) -> ExtReal { return 0.0; },
          [y](const HalfLineLower& f) -> ExtReal { return y >= f.a ? ExtReal(0.0) : ExtReal::pos_inf(); },
          [y](const HalfLineUpper& f) -> ExtReal { return y <= f.b ? ExtReal(0.0) : ExtReal::pos_inf(); },
          [y](const IntervalIndicator& f) -> ExtReal {
            return (y >= f.a && y <= f.b) ? ExtReal(0.0) : ExtReal::pos_inf();
          },
          [y](const Quadratic& f) -> ExtReal { return f.c * y * y; },
          [y](const AbsPower& f) -> ExtReal { return f.c * std::pow(std::abs(y), f.p); },
          [this, y](const PiecewiseLinearConvex& f) -> ExtReal {
            const auto& bp = f.breakpoints;
            if (bp.empty()) return f.slopes[0] * y;
            const auto i = static_cast<std::size_t>(std::upper_bound(bp.begin(), bp.end(), y) - bp.begin());
            if (i == 0) return pl_values_[0] + f.slopes[0] * (y - bp[0]);
            return pl_values_[i - 1] + f.slopes[i] * (y - bp[i - 1]);
          },
      },
      v_);
}

std::pair<ExtReal, ExtReal> ConvexFunction::one_sided_derivatives(double y) const {
  if (!in_domain(y)) {
    std::ostringstream os;
    os << "one_sided_derivatives: y = " << y << " is outside Dom(" << describe() << ")";
    throw DomainError(os.str());
  }
  using P = std::pair<ExtReal, ExtReal>;
  return std::visit(
      overloaded{
          [](const ZeroFunction&) -> P { return {0.0, 0.0}; },
          [y](const HalfLineLower& f) -> P { return {y == f.a ? ExtReal::neg_inf() : ExtReal(0.0), 0.0}; },
          [y](const HalfLineUpper& f) -> P { return {0.0, y == f.b ? ExtReal::pos_inf() : ExtReal(0.0)}; },
          [y](const IntervalIndicator& f) -> P {
            return {y == f.a ? ExtReal::neg_inf() : ExtReal(0.0), y == f.b ? ExtReal::pos_inf() : ExtReal(0.0)};
          },
          [y](const Quadratic& f) -> P { return {2.0 * f.c * y, 2.0 * f.c * y}; },
          [y](const AbsPower& f) -> P {
            if (f.p == 1.0) {
              if (y > 0.0) return {f.c, f.c};
              if (y < 0.0) return {-f.c, -f.c};
              return {-f.c, f.c};
            }
            const double d = f.c * f.p * std::pow(std::abs(y), f.p - 1.0) * (y < 0.0 ? -1.0 : 1.0);
            return {d, d};
          },
          [y](const PiecewiseLinearConvex& f) -> P {
            const auto& bp = f.breakpoints;
            const auto lo = static_cast<std::size_t>(std::lower_bound(bp.begin(), bp.end(), y) - bp.begin());
            const auto hi = static_cast<std::size_t>(std::upper_bound(bp.begin(), bp.end(), y) - bp.begin());
            return {f.slopes[lo], f.slopes[hi]};
          },
      },
      v_);
}

std::pair<ExtReal, ExtReal> ConvexFunction::domain() const {
  using P = std::pair<ExtReal, ExtReal>;
  const P whole{ExtReal::neg_inf(), ExtReal::pos_inf()};
  return std::visit(overloaded{
                        [](const HalfLineLower& f) -> P { return {f.a, ExtReal::pos_inf()}; },
                        [](const HalfLineUpper& f) -> P { return {ExtReal::neg_inf(), f.b}; },
                        [](const IntervalIndicator& f) -> P { return {f.a, f.b}; },
                        [&whole](const auto&) -> P { return whole; },
                    },
                    v_);
}

double ConvexFunction::resolvent(double eps, double y) const {
  if (!(eps > 0.0)) throw PreconditionError("resolvent: eps must be positive");
  return std::visit(
      overloaded{
          [y](const ZeroFunction&) { return y; },
          [y](const HalfLineLower& f) { return std::max(y, f.a); },
          [y](const HalfLineUpper& f) { return std::min(y, f.b); },
          [y](const IntervalIndicator& f) { return std::clamp(y, f.a, f.b); },
          [y, eps](const Quadratic& f) { return y / (1.0 + 2.0 * eps * f.c); },
          [y, eps](const AbsPower& f) {
            const double k = eps * f.c;
            if (f.p == 1.0) {
              if (y > k) return y - k;
              if (y < -k) return y + k;
              return 0.0;
            }
            if (f.p == 2.0) return y / (1.0 + 2.0 * k);
            const double w = abs_power_root(k * f.p, f.p, std::abs(y));
            return y < 0.0 ? -w : w;
          },
          [y, eps](const PiecewiseLinearConvex& f) {
            const auto& bp = f.breakpoints;
            const auto& s = f.slopes;
            // v + eps * d phi(v) is increasing: walk segments, then breakpoints.
            for (std::size_t i = 0; i <= bp.size(); ++i) {
              const double v = y - eps * s[i];
              const bool above_left = (i == 0) || v > bp[i - 1];
              const bool below_right = (i == bp.size()) || v < bp[i];
              if (above_left && below_right) return v;
              if (i < bp.size()) {
                const double lo = bp[i] + eps * s[i];
                const double hi = bp[i] + eps * s[i + 1];
                if (y >= lo && y <= hi) return bp[i];
              }
            }
            throw ConvergenceError("piecewise_linear resolvent: no segment matched");
          },
      },
      v_);
}

ProxResult ConvexFunction::prox(double eps, double y) const {
  const double j = resolvent(eps, y);
  const double diff = y - j;
  const ExtReal at_j = evaluate(j);
  // J_eps(y) is always in Dom(phi).
  return ProxResult{j, diff / eps, diff * diff / (2.0 * eps) + at_j.value()};
}

double ConvexFunction::backward_prox_step(double eps, double h, double v) const {
  if (!(eps > 0.0)) throw PreconditionError("backward_prox_step: eps must be positive");
  if (!(h >= 0.0)) throw PreconditionError("backward_prox_step: h must be nonnegative");
  if (h == 0.0 || is_zero()) return v;
  const double w = resolvent(eps + h, v);
  return (eps * v + h * w) / (eps + h);
}

double backward_prox_step_bisection(const ConvexFunction& f, double eps, double h, double v) {
  if (!(eps > 0.0)) throw PreconditionError("backward_prox_step: eps must be positive");
  if (!(h >= 0.0)) throw PreconditionError("backward_prox_step: h must be nonnegative");
  if (h == 0.0) return v;
  auto residual = [&](double y) { return y + h * f.yosida(eps, y) - v; };
  // The root lies between v and v - h * yosida(v) by monotonicity.
  const double other = v - h * f.yosida(eps, v);
  double lo = std::min(v, other);
  double hi = std::max(v, other);
  if (lo == hi) return v;
  for (int it = 0; it < kMaxIter; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) return mid;
    const double r = residual(mid);
    if (r == 0.0) return mid;
    if (r > 0.0) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return 0.5 * (lo + hi);
}

std::string ConvexFunction::describe() const {
  std::ostringstream os;
  std::visit(overloaded{
                 [&](const ZeroFunction&) { os << "zero"; },
                 [&](const HalfLineLower& f) { os << "half_line_lower(a=" << f.a << ")"; },
                 [&](const HalfLineUpper& f) { os << "half_line_upper(b=" << f.b << ")"; },
                 [&](const IntervalIndicator& f) { os << "interval(a=" << f.a << ", b=" << f.b << ")"; },
                 [&](const Quadratic& f) { os << "quadratic(c=" << f.c << ")"; },
                 [&](const AbsPower& f) { os << "abs_power(c=" << f.c << ", p=" << f.p << ")"; },
                 [&](const PiecewiseLinearConvex& f) {
                   os << "piecewise_linear(" << f.breakpoints.size() << " breakpoints)";
                 },
             },
             v_);
  return os.str();
}

}  // namespace pvi
