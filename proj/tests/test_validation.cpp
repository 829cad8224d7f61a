#include <catch_amalgamated.hpp>

#include "pvi/errors.hpp"
#include "pvi/validation.hpp"

using namespace pvi;

namespace {

ProblemSpec with(const std::string& f, const std::string& g, ConvexFunction phi = ConvexFunction::zero(),
                 ConvexFunction psi = ConvexFunction::zero(), AssumptionConstants k = {}) {
  Coefficients c = Coefficients::constant(1, 0.0, 1.0);
  c.f = Expression::parse(f);
  c.g = Expression::parse(g);
  return ProblemSpec(DomainSpec::interval(0.0, 1.0), std::move(c), std::move(phi), std::move(psi), 1.0, k);
}

const CheckEntry& entry(const ValidationReport& r, const std::string& name) {
  const CheckEntry* e = r.find(name);
  REQUIRE(e != nullptr);
  return *e;
}

}  // namespace

TEST_CASE("heat preset passes every standing hypothesis", "[validation]") {
  const ValidationReport r = validate_assumptions(presets::neumann_heat(), 1000, 1);
  CHECK(r.all_passed());
  for (const char* n : {"lipschitz_b_sigma", "f_monotone_y", "f_lipschitz_z", "f_growth", "g_monotone_y", "g_growth",
                        "initial_bound", "boundary_unit_normal"})
    CHECK(r.find(n) != nullptr);
}

TEST_CASE("cubic generator breaks monotonicity with alpha = 0", "[validation]") {
  AssumptionConstants k;
  k.gamma = 1e6;
  const ValidationReport r = validate_assumptions(with("y^3", "0", ConvexFunction::zero(), ConvexFunction::zero(), k), 1000, 2);
  const CheckEntry& m = entry(r, "f_monotone_y");
  CHECK_FALSE(m.passed);
  CHECK(m.margin > 0.0);
  // (y - y')(y^3 - y'^3) / |y - y'|^2 = y^2 + y y' + y'^2 reaches ~3 * 100 on [-10, 10]
  CHECK(m.value > 100.0);
}

TEST_CASE("ball boundary normal", "[validation]") {
  const ValidationReport r = validate_assumptions(presets::ball_diffusion(3), 1000, 3);
  CHECK(entry(r, "boundary_unit_normal").passed);
  CHECK(entry(r, "boundary_unit_normal").value <= 1e-8);
}

TEST_CASE("Lipschitz and growth violations", "[validation]") {
  Coefficients c = Coefficients::constant(1, 0.0, 1.0);
  c.drift[0] = Expression::parse("3*x1");
  const ProblemSpec p(DomainSpec::interval(0.0, 1.0), std::move(c), ConvexFunction::zero(), ConvexFunction::zero(), 1.0,
                      AssumptionConstants{});
  CHECK_FALSE(entry(validate_assumptions(p, 500, 4), "lipschitz_b_sigma").passed);
  CHECK_FALSE(entry(validate_assumptions(with("2", "0"), 500, 4), "f_growth").passed);
}

TEST_CASE("non-finite coefficient values raise EvalError", "[validation]") {
  AssumptionConstants k;
  k.gamma = 10;
  CHECK_THROWS_AS(validate_assumptions(with("1/(y-y)", "0", ConvexFunction::zero(), ConvexFunction::zero(), k), 100, 5),
                  EvalError);
}

TEST_CASE("validation is deterministic given the seed", "[validation][property]") {
  const ProblemSpec p = with("sin(y) + z1", "-y");
  const ValidationReport a = validate_assumptions(p, 300, 9), b = validate_assumptions(p, 300, 9);
  REQUIRE(a.entries.size() == b.entries.size());
  for (std::size_t i = 0; i < a.entries.size(); ++i) {
    CHECK(a.entries[i].value == b.entries[i].value);
    CHECK(a.entries[i].margin == b.entries[i].margin);
  }
}

TEST_CASE("compatibility of the indicator pair", "[validation]") {
  AssumptionConstants k;
  k.gamma = 1.0;
  const std::vector<double> eps{1e-1, 1e-2, 1e-3};
  const CompatReport good =
      check_compatibility(with("-y", "-y", ConvexFunction::half_line_lower(-1.0), ConvexFunction::half_line_upper(1.0), k),
                          eps, 1000, 6);
  CHECK(good.all_passed());
  CHECK(good.per_eps.size() == 3);

  const CompatReport zero = check_compatibility(presets::neumann_heat(), eps, 200, 6);
  CHECK(zero.all_passed());

  // Sign conditions y g <= 0 and y f <= 0 make both compatibility conditions hold.
  const CompatReport signs =
      check_compatibility(with("-y^3", "-2*y", ConvexFunction::interval(-1.0, 2.0), ConvexFunction::quadratic(1.0), k), eps,
                          1000, 6);
  CHECK(signs.boundary_g.passed);
  CHECK(signs.interior_f.passed);

  const CompatReport bad =
      check_compatibility(with("0", "-1", ConvexFunction::half_line_lower(-1.0), ConvexFunction::zero(), k), eps, 1000, 6);
  CHECK_FALSE(bad.boundary_g.passed);
  CHECK(bad.boundary_g.margin > 0.0);
  CHECK(bad.interior_f.passed);

  // phi and psi pulling in opposite directions at the same y
  const CompatReport clash = check_compatibility(
      with("0", "0", ConvexFunction::half_line_upper(0.5), ConvexFunction::half_line_lower(-0.5), k), eps, 1000, 6);
  CHECK(clash.yosida_product.passed);
  const CompatReport clash2 = check_compatibility(
      with("0", "0", ConvexFunction::half_line_upper(0.5), ConvexFunction::half_line_upper(1.0), k), eps, 1000, 6);
  CHECK(clash2.yosida_product.passed);
  const CompatReport clash3 =
      check_compatibility(with("0", "0", ConvexFunction::piecewise_linear({0.0}, {-1.0, 1.0}),
                               ConvexFunction::piecewise_linear({0.0}, {-2.0, 0.0}), k),
                          eps, 1000, 6);
  CHECK(clash3.yosida_product.passed);
}

TEST_CASE("uniqueness hypotheses", "[validation]") {
  AssumptionConstants k;
  k.gamma = 1.0;
  k.beta = 1.0;
  k.mu = 3.5;
  CHECK(entry(uniqueness_hypotheses_check(with("0", "-y", ConvexFunction::zero(), ConvexFunction::zero(), k), 500, 7),
              "g_decreasing_in_y")
            .passed);
  const CheckEntry& inc =
      entry(uniqueness_hypotheses_check(with("0", "y", ConvexFunction::zero(), ConvexFunction::zero(), k), 500, 7),
            "g_decreasing_in_y");
  CHECK_FALSE(inc.passed);
  CHECK(inc.margin > 0.0);
  const CheckEntry& mod =
      entry(uniqueness_hypotheses_check(with("sin(x1)*y", "0", ConvexFunction::zero(), ConvexFunction::zero(), k), 500, 7),
            "f_x_modulus");
  CHECK(mod.passed);
  // |sin x - sin x'| |y| / (|x - x'| (1 + |p|)) <= 10 on the sampled box
  CHECK(mod.value <= 10.0 + 1e-9);
}
