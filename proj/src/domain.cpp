#include "pvi/domain.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pvi/errors.hpp"
#include "pvi/rng.hpp"

namespace pvi {

namespace {

// q(w) = (5 + 15 w^2 - 5 w^4 + w^6) / 16 matches |w| with three derivatives at |w| = 1.
double blend(double w) {
  const double w2 = w * w;
  return (5.0 + w2 * (15.0 + w2 * (-5.0 + w2))) / 16.0;
}
double blend_d1(double w) {
  const double w2 = w * w;
  return w * (30.0 + w2 * (-20.0 + 6.0 * w2)) / 16.0;
}
double blend_d2(double w) {
  const double s = 1.0 - w * w;
  return 30.0 * s * s / 16.0;
}

}  // namespace

DomainSpec DomainSpec::interval(double left, double right) {
  if (!(std::isfinite(left) && std::isfinite(right) && left < right))
    throw DomainError("interval domain needs finite left < right");
  return DomainSpec(IntervalDomain{left, right}, 0.5 * (right - left));
}

DomainSpec DomainSpec::ball(const Point& center, double radius) {
  if (center.size() < 1 || center.size() > kMaxDim)
    throw DomainError("ball domain dimension must be in [1, " + std::to_string(kMaxDim) + "]");
  if (!(std::isfinite(radius) && radius > 0.0)) throw DomainError("ball radius must be positive");
  if (!center.allFinite()) throw DomainError("ball center must be finite");
  return DomainSpec(BallDomain{center, radius}, radius);
}

int DomainSpec::dimension() const {
  if (const auto* b = std::get_if<BallDomain>(&v_)) return static_cast<int>(b->center.size());
  return 1;
}

double DomainSpec::level(const Point& x) const {
  if (const auto* iv = std::get_if<IntervalDomain>(&v_)) {
    const double r = 0.5 * (iv->right - iv->left);
    const double u = x[0] - 0.5 * (iv->left + iv->right);
    const double a = 0.5 * r;
    if (std::abs(u) >= a) return std::abs(u) - r;
    return a * blend(u / a) - r;
  }
  const auto& b = std::get<BallDomain>(v_);
  return ((x - b.center).squaredNorm() - b.radius * b.radius) / (2.0 * b.radius);
}

Point DomainSpec::gradient(const Point& x) const {
  if (const auto* iv = std::get_if<IntervalDomain>(&v_)) {
    const double r = 0.5 * (iv->right - iv->left);
    const double u = x[0] - 0.5 * (iv->left + iv->right);
    const double a = 0.5 * r;
    Point g(1);
    g[0] = std::abs(u) >= a ? (u > 0.0 ? 1.0 : -1.0) : blend_d1(u / a);
    return g;
  }
  const auto& b = std::get<BallDomain>(v_);
  return (x - b.center) / b.radius;
}

SquareMatrix DomainSpec::hessian(const Point& x) const {
  if (const auto* iv = std::get_if<IntervalDomain>(&v_)) {
    const double r = 0.5 * (iv->right - iv->left);
    const double u = x[0] - 0.5 * (iv->left + iv->right);
    const double a = 0.5 * r;
    SquareMatrix h(1, 1);
    h(0, 0) = std::abs(u) >= a ? 0.0 : blend_d2(u / a) / a;
    return h;
  }
  const auto& b = std::get<BallDomain>(v_);
  const auto d = b.center.size();
  return SquareMatrix::Identity(d, d) / b.radius;
}

bool DomainSpec::on_boundary(const Point& x, double tol) const { return std::abs(level(x)) <= tol; }

Projection DomainSpec::project(const Point& y) const {
  if (const auto* iv = std::get_if<IntervalDomain>(&v_)) {
    Point p(1);
    p[0] = std::clamp(y[0], iv->left, iv->right);
    return {p, std::abs(y[0] - p[0])};
  }
  const auto& b = std::get<BallDomain>(v_);
  const Point rel = y - b.center;
  const double n = rel.norm();
  if (n == 0.0) throw GeometryError("ball projection of the center is undefined");
  Point p = b.center + rel * (b.radius / n);
  return {p, (y - p).norm()};
}

Projection DomainSpec::project_newton(const Point& y) const {
  const double l0 = level(y);
  if (l0 > reach_) {
    std::ostringstream os;
    os << "projection: level " << l0 << " exceeds reach " << reach_ << "; reduce the time step";
    throw GeometryError(os.str());
  }
  if (l0 <= 0.0) return {y, 0.0};

  // Zero of s -> level(y - s * dir) by damped Newton, starting from the
  // first-order guess.
  auto line_root = [this](const Point& origin, const Point& dir, double s) {
    double val = level(origin - s * dir);
    for (int it = 0; it < 60; ++it) {
      if (std::abs(val) <= 1e-14) return s;
      const double slope = -gradient(origin - s * dir).dot(dir);
      if (!(std::abs(slope) > 1e-300)) throw GeometryError("projection: degenerate level-set gradient");
      double step = -val / slope;
      double damp = 1.0;
      double next_val = level(origin - (s + step) * dir);
      while (std::abs(next_val) > std::abs(val) && damp > 1e-6) {
        damp *= 0.5;
        next_val = level(origin - (s + damp * step) * dir);
      }
      s += damp * step;
      val = next_val;
    }
    if (std::abs(val) <= 1e-12) return s;
    throw GeometryError("projection: Newton iteration did not converge");
  };

  const Point g0 = gradient(y);
  const double gn = g0.squaredNorm();
  if (!(gn > 0.0)) throw GeometryError("projection: zero level-set gradient");
  const double s1 = line_root(y, g0, l0 / gn);
  const Point p1 = y - s1 * g0;

  Point n = gradient(p1);
  const double nn = n.norm();
  if (!(nn > 0.0)) throw GeometryError("projection: zero normal at first hit");
  n /= nn;
  const double s2 = line_root(y, n, (y - p1).dot(n));
  Point p = y - s2 * n;
  return {p, (y - p).norm()};
}

Point DomainSpec::box_lower() const {
  if (const auto* iv = std::get_if<IntervalDomain>(&v_)) {
    Point p(1);
    p[0] = iv->left;
    return p;
  }
  const auto& b = std::get<BallDomain>(v_);
  return b.center.array() - b.radius;
}

Point DomainSpec::box_upper() const {
  if (const auto* iv = std::get_if<IntervalDomain>(&v_)) {
    Point p(1);
    p[0] = iv->right;
    return p;
  }
  const auto& b = std::get<BallDomain>(v_);
  return b.center.array() + b.radius;
}

double DomainSpec::norm_bound() const {
  if (const auto* iv = std::get_if<IntervalDomain>(&v_)) return std::max(std::abs(iv->left), std::abs(iv->right));
  const auto& b = std::get<BallDomain>(v_);
  return b.center.norm() + b.radius;
}

Point DomainSpec::boundary_point(std::span<const double> u) const {
  if (const auto* iv = std::get_if<IntervalDomain>(&v_)) {
    Point p(1);
    p[0] = u[0] < 0.5 ? iv->left : iv->right;
    return p;
  }
  const auto& b = std::get<BallDomain>(v_);
  const auto d = b.center.size();
  if (d == 1) {
    Point p(1);
    p[0] = b.center[0] + (u[0] < 0.5 ? -b.radius : b.radius);
    return p;
  }
  Point dir(d);
  for (Eigen::Index i = 0; i < d; ++i) dir[i] = inverse_normal_cdf(u[static_cast<std::size_t>(i)]);
  double n = dir.norm();
  if (n == 0.0) {
    dir.setZero();
    dir[0] = 1.0;
    n = 1.0;
  }
  return b.center + dir * (b.radius / n);
}

std::string DomainSpec::describe() const {
  std::ostringstream os;
  if (const auto* iv = std::get_if<IntervalDomain>(&v_)) {
    os << "interval[" << iv->left << ", " << iv->right << "]";
  } else {
    const auto& b = std::get<BallDomain>(v_);
    os << "ball(center=(";
    for (Eigen::Index i = 0; i < b.center.size(); ++i) os << (i ? ", " : "") << b.center[i];
    os << "), radius=" << b.radius << ")";
  }
  return os.str();
}

}  // namespace pvi
