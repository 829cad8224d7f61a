#pragma once

#include <span>
#include <string>
#include <variant>

#include <Eigen/Dense>

namespace pvi {

inline constexpr int kMaxDim = 4;

// Small vectors/matrices with inline storage; no heap traffic in path loops.
using Point = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxDim, 1>;
using SquareMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxDim, kMaxDim>;

inline Point make_point(std::initializer_list<double> xs) {
  Point p(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double v : xs) p[i++] = v;
  return p;
}

// [left, right] in d = 1. The level function is the signed distance to the
// nearest end within half a radius of the boundary, and a C^3 even polynomial
// blend of it around the midpoint.
struct IntervalDomain {
  double left;
  double right;
};

// Closed ball; level(x) = (|x - c|^2 - r^2) / (2 r).
struct BallDomain {
  Point center;
  double radius;
};

struct Projection {
  Point point;
  double distance;
};

class DomainSpec {
 public:
  using Variant = std::variant<IntervalDomain, BallDomain>;

  static DomainSpec interval(double left, double right);
  static DomainSpec ball(const Point& center, double radius);

  const Variant& variant() const { return v_; }
  int dimension() const;
  bool is_interval() const { return std::holds_alternative<IntervalDomain>(v_); }

  double level(const Point& x) const;
  Point gradient(const Point& x) const;
  SquareMatrix hessian(const Point& x) const;

  bool contains(const Point& x, double tol = 1e-10) const { return level(x) <= tol; }
  bool on_boundary(const Point& x, double tol = 1e-10) const;

  // Nearest boundary point of an exterior point. Analytic for both presets.
  Projection project(const Point& y) const;
  // Generic level-set projection: damped Newton along -grad(level)(y), then one
  // correction along the normal at the first hit. Throws GeometryError when
  // level(y) exceeds reach() or the iteration stalls.
  Projection project_newton(const Point& y) const;

  // Largest exterior level value the Newton projection accepts.
  double reach() const { return reach_; }
  void set_reach(double r) { reach_ = r; }

  // Whether the level function is a polynomial of degree <= 2 in x.
  bool level_is_quadratic() const { return std::holds_alternative<BallDomain>(v_); }

  Point box_lower() const;
  Point box_upper() const;
  // sup |x| over the closed domain.
  double norm_bound() const;

  // Deterministic boundary sample from d uniforms in (0, 1).
  Point boundary_point(std::span<const double> u) const;

  std::string describe() const;

 private:
  explicit DomainSpec(Variant v, double reach) : v_(std::move(v)), reach_(reach) {}

  Variant v_;
  double reach_;
};

}  // namespace pvi
