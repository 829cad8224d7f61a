#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "pvi/errors.hpp"
#include "pvi/oracles.hpp"

using namespace pvi;
using Catch::Approx;
using std::numbers::pi;

namespace {

GridFunction field(std::vector<double> t, std::vector<double> x, double (*fn)(double, double)) {
  GridFunction g{std::move(t), std::move(x), {}};
  for (double tt : g.t)
    for (double xx : g.x) g.values.push_back(fn(tt, xx));
  return g;
}

}  // namespace

TEST_CASE("cosine series examples", "[oracles]") {
  CHECK(neumann_heat_series(0.3, 0.7, {1.0}, 1).value == 1.0);
  CHECK(neumann_heat_series(0.25, 0.0, {0.0, 1.0}, 2).value == Approx(std::cos(pi / 4)).epsilon(1e-15));
  // frozen value e^{-pi^2 / 4} cos(pi / 4)
  CHECK(neumann_heat_series(0.25, 0.5, {0.0, 1.0}, 2).value == Approx(0.05996617111266305).epsilon(1e-14));
  const double r = neumann_heat_series(0.0, 0.4, {0.0, 1.0}, 2).value / neumann_heat_series(0.0, 0.2, {0.0, 1.0}, 2).value;
  CHECK(r == Approx(std::exp(-pi * pi * 0.1)).epsilon(1e-13));
  const SeriesValue cut = neumann_heat_series(0.0, 0.1, {1.0, 0.0, 0.5}, 2);
  CHECK(cut.value == 1.0);
  CHECK(cut.tail_bound == Approx(0.5 * std::exp(-4.0 * pi * pi * 0.05)));
  CHECK_THROWS_AS(neumann_heat_series(0.0, -1.0, {1.0}, 1), PreconditionError);
}

TEST_CASE("cosine coefficients by quadrature", "[oracles]") {
  const auto c = cosine_coefficients([](double x) { return 2.0 + 3.0 * std::cos(2.0 * pi * x); }, 4);
  REQUIRE(c.size() == 4);
  CHECK(c[0] == Approx(2.0).margin(1e-12));
  CHECK(c[1] == Approx(0.0).margin(1e-12));
  CHECK(c[2] == Approx(3.0).margin(1e-12));
  CHECK(c[3] == Approx(0.0).margin(1e-12));
  // x^2: c_0 = 1/3, c_k = 4 (-1)^k / (k pi)^2
  const auto q = cosine_coefficients([](double x) { return x * x; }, 5);
  CHECK(q[0] == Approx(1.0 / 3.0).margin(1e-12));
  for (int k = 1; k < 5; ++k) CHECK(q[k] == Approx(4.0 * (k % 2 ? -1.0 : 1.0) / (k * k * pi * pi)).margin(1e-10));
  CHECK_THROWS_AS(cosine_coefficients([](double) { return 0.0; }, 3, 5), PreconditionError);
}

TEST_CASE("finite differences match the series for the heat preset", "[oracles]") {
  const ProblemSpec p = presets::neumann_heat();
  const FdGrid fd = solve_penalized_fd(p, 1e-3, 200, 400, 0.5);
  REQUIRE(fd.x.size() == 201);
  REQUIRE(fd.t.size() == 401);
  double worst = 0.0;
  for (std::size_t m = 0; m < fd.t.size(); m += 40)
    for (std::size_t j = 0; j < fd.x.size(); ++j)
      worst = std::max(worst, std::abs(fd.at(m, j) - neumann_heat_series(fd.x[j], fd.t[m], {0.0, 1.0}, 2).value));
  CHECK(worst <= 1e-3);
}

TEST_CASE("finite differences conserve mass under Neumann conditions", "[oracles][property]") {
  Coefficients c = Coefficients::constant(1, 0.0, 1.0);
  c.h = Expression::parse("x1^2 + 0.3*sin(5*x1)");
  const ProblemSpec p(DomainSpec::interval(0.0, 1.0), std::move(c), ConvexFunction::zero(), ConvexFunction::zero(), 0.3,
                      AssumptionConstants{});
  for (double theta : {0.5, 0.75, 1.0}) {
    const FdGrid fd = solve_penalized_fd(p, 1e-3, 64, 50, theta);
    auto mass = [&](std::size_t m) {
      double s = 0.0;
      for (std::size_t j = 0; j < fd.x.size(); ++j) s += (j == 0 || j + 1 == fd.x.size() ? 0.5 : 1.0) * fd.at(m, j);
      return s / 64.0;
    };
    CHECK(mass(fd.t.size() - 1) == Approx(mass(0)).margin(1e-12));
  }
}

TEST_CASE("finite-difference obstacle solution stays near the constraint", "[oracles]") {
  const double eps = 1e-3;
  const FdGrid fd = solve_penalized_fd(presets::obstacle(1.0), eps, 100, 200, 1.0);
  const double lo = *std::min_element(fd.values.begin(), fd.values.end());
  CHECK(lo >= -2.0 * std::sqrt(eps));
  CHECK(lo < 0.0);
  CHECK_THROWS_AS(solve_penalized_fd(presets::obstacle(1.0), eps, 100, 200, 0.4), StabilityError);
  CHECK_THROWS_AS(solve_penalized_fd(presets::ball_diffusion(2), eps, 100, 200, 1.0), PreconditionError);
}

TEST_CASE("deterministic VI: linear decay", "[oracles]") {
  const ProblemSpec p = presets::linear_decay(1.5, 2.0);
  const Trajectory tr = solve_deterministic_vi(p, make_point({0.2}), 0.0, 10000, ViMode{false, 1e-3});
  REQUIRE(tr.Y.size() == 10001);
  CHECK(tr.Y.front() == Approx(2.0 * std::exp(-1.5)).epsilon(1e-8));
  CHECK(tr.Y.back() == 2.0);
  CHECK_THROWS_AS(solve_deterministic_vi(presets::neumann_heat(), make_point({0.2}), 0.0, 10, ViMode{}),
                  PreconditionError);
}

TEST_CASE("deterministic VI: exact obstacle", "[oracles]") {
  const ProblemSpec p = presets::obstacle(0.0);
  const Trajectory tr = solve_deterministic_vi(p, make_point({0.5}), 0.0, 200, ViMode{true, 0.0});
  for (std::size_t k = 0; k < tr.Y.size(); ++k) CHECK(tr.Y[k] == 0.0);
  for (std::size_t k = 0; k + 1 < tr.U.size(); ++k) CHECK(tr.U[k] == Approx(-1.0).epsilon(1e-12));
  // penalised: Y sits at about -eps, up to an O(dt / eps) splitting bias
  const Trajectory pen = solve_deterministic_vi(p, make_point({0.5}), 0.0, 20000, ViMode{false, 1e-3});
  CHECK(pen.Y.front() == Approx(-1e-3).epsilon(3e-2));
  Coefficients c = Coefficients::constant(1, 0.0, 0.0);
  const ProblemSpec smooth(DomainSpec::interval(0.0, 1.0), std::move(c), ConvexFunction::quadratic(1.0),
                           ConvexFunction::zero(), 1.0, AssumptionConstants{});
  CHECK_THROWS_AS(solve_deterministic_vi(smooth, make_point({0.0}), 0.0, 10, ViMode{true, 0.0}), PreconditionError);
}

TEST_CASE("compare", "[oracles]") {
  const GridFunction a = field({0.0, 0.5, 1.0}, {0.0, 0.5, 1.0}, [](double t, double x) { return t + 2.0 * x; });
  const CompareResult same = compare(a, a);
  CHECK(same.sup == 0.0);
  CHECK(same.l2 == 0.0);
  const GridFunction shifted = field({0.0, 0.25, 1.0}, {0.0, 0.3, 1.0}, [](double t, double x) { return t + 2.0 * x + 1.0; });
  const CompareResult sh = compare(a, shifted);
  CHECK(sh.sup == Approx(1.0).epsilon(1e-14));
  CHECK(sh.l2 == Approx(1.0).epsilon(1e-14));
  CHECK(sh.table.size() == 16);
  const GridFunction far = field({0.0, 1.0}, {2.0, 3.0}, [](double, double) { return 0.0; });
  CHECK_THROWS_AS(compare(a, far), ShapeError);
}

TEST_CASE("compare at nodes interpolates only the reference", "[oracles]") {
  const GridFunction coarse = field({0.5}, {0.0, 0.4, 1.0, 1.5}, [](double, double x) { return x * x; });
  const GridFunction fine = field({0.0, 1.0}, {0.0, 0.2, 0.4, 0.6, 0.8, 1.0}, [](double, double x) { return x * x; });
  const CompareResult r = compare_at_nodes(coarse, fine);
  REQUIRE(r.table.size() == 3);  // 1.5 lies outside the reference
  CHECK(r.table[0].diff == 0.0);
  CHECK(r.table[1].diff == Approx(0.0).margin(1e-15));
  CHECK(r.sup == Approx(0.0).margin(1e-15));
}
