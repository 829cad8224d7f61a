#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "pvi/domain.hpp"
#include "pvi/errors.hpp"

using namespace pvi;
using Catch::Approx;

TEST_CASE("interval level function", "[domain]") {
  const DomainSpec d = DomainSpec::interval(-1.0, 1.0);
  CHECK(d.level(make_point({1.0})) == 0.0);
  CHECK(d.level(make_point({-1.0})) == 0.0);
  CHECK(d.level(make_point({1.2})) == Approx(0.2));
  CHECK(d.level(make_point({0.0})) < 0.0);
  CHECK(std::abs(d.gradient(make_point({1.0}))[0]) == 1.0);
  CHECK(std::abs(d.gradient(make_point({-1.0}))[0]) == 1.0);
  // signed distance within r / 2 of the boundary
  CHECK(d.level(make_point({0.7})) == Approx(-0.3));
}

TEST_CASE("interval level function is C^2 across the blend", "[domain][property]") {
  const DomainSpec d = DomainSpec::interval(0.0, 2.0);  // blend switches at |u| = 1/2
  for (double s : {-1.0, 1.0}) {
    const double at = 1.0 + s * 0.5, h = 1e-7;
    const Point a = make_point({at - h}), b = make_point({at + h});
    CHECK(d.level(a) == Approx(d.level(b)).margin(1e-6));
    CHECK(d.gradient(a)[0] == Approx(d.gradient(b)[0]).margin(1e-6));
    CHECK(d.hessian(a)(0, 0) == Approx(d.hessian(b)(0, 0)).margin(1e-5));
  }
  // gradient is the derivative of the level function
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-0.5, 2.5);
  for (int i = 0; i < 500; ++i) {
    const double x = u(rng), h = 1e-6;
    const double fd = (d.level(make_point({x + h})) - d.level(make_point({x - h}))) / (2 * h);
    CHECK(d.gradient(make_point({x}))[0] == Approx(fd).margin(1e-6));
  }
}

TEST_CASE("ball level function and unit normal", "[domain]") {
  const DomainSpec d = DomainSpec::ball(make_point({0.0, 0.0}), 1.0);
  CHECK(d.dimension() == 2);
  CHECK(d.level(make_point({0.0, 0.0})) == -0.5);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const double uu[2] = {u(rng), u(rng)};
    const Point b = d.boundary_point(uu);
    CHECK(std::abs(d.level(b)) <= 1e-12);
    CHECK(std::abs(d.gradient(b).norm() - 1.0) <= 1e-8);
  }
}

TEST_CASE("projection examples", "[domain]") {
  const DomainSpec ball = DomainSpec::ball(make_point({0.0, 0.0}), 1.0);
  Projection p = ball.project(make_point({1.5, 0.0}));
  CHECK(p.point[0] == 1.0);
  CHECK(p.point[1] == 0.0);
  CHECK(p.distance == 0.5);
  const DomainSpec iv = DomainSpec::interval(-1.0, 1.0);
  p = iv.project(make_point({1.2}));
  CHECK(p.point[0] == 1.0);
  CHECK(p.distance == Approx(0.2));

  const Point y = make_point({1.2, 0.9});
  const Projection n = ball.project_newton(y);
  const Point exact = y / y.norm();
  CHECK(std::abs(n.point.norm() - 1.0) <= 1e-10);
  CHECK((n.point - exact).norm() <= 1e-8);
  CHECK(n.distance == Approx(y.norm() - 1.0));
}

TEST_CASE("Newton projection matches the analytic one", "[domain][property]") {
  const DomainSpec ball = DomainSpec::ball(make_point({0.5, -0.25, 1.0}), 2.0);
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> r(2.0, 2.8);
  for (int i = 0; i < 500; ++i) {
    Point dir = make_point({g(rng), g(rng), g(rng)});
    dir /= dir.norm();
    const Point y = make_point({0.5, -0.25, 1.0}) + r(rng) * dir;
    CHECK((ball.project_newton(y).point - ball.project(y).point).norm() <= 1e-8);
  }
  const DomainSpec iv = DomainSpec::interval(0.0, 1.0);
  for (double y : {1.0001, 1.2, 1.45, -0.3}) CHECK(iv.project_newton(make_point({y})).point[0] == Approx(iv.project(make_point({y})).point[0]).margin(1e-12));
}

TEST_CASE("reach bound", "[domain]") {
  DomainSpec iv = DomainSpec::interval(0.0, 1.0);
  CHECK_THROWS_AS(iv.project_newton(make_point({3.0})), GeometryError);
  iv.set_reach(5.0);
  CHECK(iv.project_newton(make_point({3.0})).point[0] == Approx(1.0));
  CHECK_THROWS_AS(DomainSpec::ball(make_point({0.0}), -1.0), DomainError);
  CHECK_THROWS_AS(DomainSpec::interval(1.0, 1.0), DomainError);
}
