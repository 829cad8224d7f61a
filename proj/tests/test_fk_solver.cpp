#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "pvi/errors.hpp"
#include "pvi/fk_solver.hpp"

using namespace pvi;
using Catch::Approx;

namespace {

McConfig small_mc(int paths = 2000, int steps = 20) {
  McConfig mc;
  mc.n_paths = paths;
  mc.n_steps = steps;
  mc.substeps = 4;
  return mc;
}

SolutionGrid hand_grid(const std::vector<double>& values, const std::vector<bool>& boundary, double eps) {
  SolutionGrid g;
  g.times = {0.5};
  for (std::size_t j = 0; j < values.size(); ++j) g.points.push_back(make_point({static_cast<double>(j)}));
  g.boundary = boundary;
  g.values = values;
  g.std_errors.assign(values.size(), 0.0);
  g.mc.solver.eps = eps;
  return g;
}

}  // namespace

TEST_CASE("t = 0 returns the initial condition exactly", "[fk]") {
  const ProblemSpec p = presets::neumann_heat();
  const PointEstimate e = evaluate_point(p, 0.0, make_point({0.3}), small_mc(), 1);
  CHECK(e.pinned);
  CHECK(e.value == std::cos(std::numbers::pi * 0.3));
  CHECK(e.std_error == 0.0);
}

TEST_CASE("constant initial data without a generator stays constant", "[fk]") {
  Coefficients c = Coefficients::constant(1, 0.0, 1.0);
  c.h = Expression::constant(-0.4);
  const ProblemSpec p(DomainSpec::interval(0.0, 1.0), std::move(c), ConvexFunction::zero(), ConvexFunction::zero(), 1.0,
                      AssumptionConstants{});
  for (double x : {0.0, 0.5, 1.0}) {
    const PointEstimate e = evaluate_point(p, 0.7, make_point({x}), small_mc(300, 10), 2);
    CHECK(e.value == Approx(-0.4).margin(1e-12));
    CHECK(e.std_error <= 1e-12);
  }
}

TEST_CASE("heat value is within its error band of the cosine mode", "[fk]") {
  const ProblemSpec p = presets::neumann_heat();
  const PointEstimate e = evaluate_point(p, 0.25, make_point({0.2}), small_mc(20000, 50), 3);
  const double exact = std::exp(-std::numbers::pi * std::numbers::pi * 0.25 / 2.0) * std::cos(std::numbers::pi * 0.2);
  CHECK(std::abs(e.value - exact) <= 4.0 * e.std_error + 2e-2);
  CHECK(e.std_error > 0.0);
}

TEST_CASE("autonomous formulation agrees with the time-reversed one", "[fk]") {
  const ProblemSpec p = presets::obstacle(1.0);
  const Point x = make_point({0.4});
  const McConfig mc = small_mc(5000, 25);
  const PointEstimate a = evaluate_point(p, 0.5, x, mc, 4);
  const PointEstimate b = evaluate_point_autonomous(p, 0.5, x, mc, 4);
  CHECK(std::abs(a.value - b.value) <= 3.0 * std::hypot(a.std_error, b.std_error) + 1e-3);

  Coefficients c = Coefficients::constant(1, 0.0, 1.0);
  c.drift[0] = Expression::parse("t");
  const ProblemSpec timed(DomainSpec::interval(0.0, 1.0), std::move(c), ConvexFunction::zero(), ConvexFunction::zero(),
                          1.0, AssumptionConstants{});
  CHECK_THROWS_AS(evaluate_point_autonomous(timed, 0.5, x, mc, 4), PreconditionError);
}

TEST_CASE("grid input errors", "[fk]") {
  const ProblemSpec p = presets::neumann_heat();
  try {
    solve_grid(p, {0.1}, {make_point({0.5}), make_point({1.25})}, small_mc(10, 2), 1);
    FAIL("expected DomainError");
  } catch (const DomainError& e) {
    CHECK(std::string(e.what()).find("1.25") != std::string::npos);
  }
  CHECK_THROWS_AS(solve_grid(p, {0.6}, {make_point({0.5})}, small_mc(10, 2), 1), PreconditionError);
  CHECK_THROWS_AS(solve_grid(p, {}, {make_point({0.5})}, small_mc(10, 2), 1), PreconditionError);
  CHECK_THROWS_AS(solve_grid(p, {0.1}, {make_point({0.5, 0.5})}, small_mc(10, 2), 1), PreconditionError);
}

TEST_CASE("grid solves are deterministic and flag boundary points", "[fk]") {
  const ProblemSpec p = presets::neumann_heat();
  const std::vector<Point> pts{make_point({0.0}), make_point({0.5}), make_point({1.0})};
  const SolutionGrid a = solve_grid(p, {0.0, 0.2}, pts, small_mc(500, 10), 9);
  const SolutionGrid b = solve_grid(p, {0.0, 0.2}, pts, small_mc(500, 10), 9);
  CHECK(a.values == b.values);
  CHECK(a.std_errors == b.std_errors);
  CHECK(a.boundary == std::vector<bool>{true, false, true});
  CHECK(a.value(0, 0) == 1.0);
  // distinct node streams: mirrored points are not copies of each other
  CHECK(a.value(1, 0) != -a.value(1, 2));
  const SolutionGrid c = solve_grid(p, {0.0, 0.2}, pts, small_mc(500, 10), 10);
  CHECK(a.values != c.values);
}

TEST_CASE("membership report", "[fk]") {
  const ProblemSpec obs = presets::obstacle(1.0);
  // slack 2 sqrt(1e-4) = 0.02
  const MembershipReport ok = domain_membership_report(hand_grid({0.0, 0.3, -0.019}, {true, false, true}, 1e-4), obs);
  CHECK(ok.all_passed());
  const MembershipCheck* lower = nullptr;
  for (const auto& c : ok.checks)
    if (c.name == "phi_lower") lower = &c;
  REQUIRE(lower != nullptr);
  CHECK(lower->applicable);
  CHECK(lower->min_margin == -0.019);
  CHECK(lower->worst_node == 2);
  const MembershipReport bad = domain_membership_report(hand_grid({0.0, -0.05, 0.1}, {true, false, true}, 1e-4), obs);
  CHECK_FALSE(bad.all_passed());
  // full-domain functions pass vacuously
  const MembershipReport heat =
      domain_membership_report(hand_grid({-7.0, 9.0}, {true, true}, 1e-4), presets::neumann_heat());
  CHECK(heat.all_passed());
  for (const auto& c : heat.checks) CHECK_FALSE(c.applicable);
}

TEST_CASE("continuity report", "[fk]") {
  SolutionGrid g;
  g.times = {0.0, 0.5};
  g.points = {make_point({0.0}), make_point({0.25})};
  g.values = {1.0, 2.0, 1.5, 1.0};
  g.std_errors = {0.0, 0.1, 0.2, 0.0};
  g.boundary = {true, false};
  const ContinuityReport r = continuity_report(g);
  CHECK_FALSE(r.empty);
  CHECK(r.max_jump_t == 1.0);
  CHECK(r.max_slope_t == 2.0);
  CHECK(r.max_jump_x == 1.0);
  CHECK(r.max_slope_x == 4.0);
  CHECK(r.max_std_error == 0.2);
  g.times = {0.0};
  g.points.resize(1);
  g.values.resize(1);
  CHECK(continuity_report(g).empty);
}
