// Acceptance run: one line per criterion, tolerances pinned below.
//
//   acceptance            exit 1 if any criterion not listed in kKnownRed fails
//   acceptance --strict   exit 1 if any criterion fails
//   acceptance --only N   run criterion N alone

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <limits>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "pvi/bsvi.hpp"
#include "pvi/cli.hpp"
#include "pvi/convex.hpp"
#include "pvi/fk_solver.hpp"
#include "pvi/io.hpp"
#include "pvi/oracles.hpp"
#include "pvi/reflected_sde.hpp"
#include "pvi/validation.hpp"

using namespace pvi;

namespace {

// Criteria whose failure is analysed in the README and not treated as a
// regression by the default run.
const std::set<int> kKnownRed = {8};

struct Outcome {
  bool passed;
  std::string detail;
};

struct Criterion {
  int id;
  const char* title;
  double time_limit_s;
  std::function<Outcome()> run;
};

std::string fmt(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

std::vector<ConvexFunction> all_variants() {
  return {ConvexFunction::zero(),
          ConvexFunction::half_line_lower(-0.5),
          ConvexFunction::half_line_upper(0.75),
          ConvexFunction::interval(-1.0, 2.0),
          ConvexFunction::quadratic(1.5),
          ConvexFunction::abs_power(0.7, 3.0),
          ConvexFunction::piecewise_linear({-1.0, 0.0, 2.0}, {-2.0, -0.5, 1.0, 3.0})};
}

// Indicator Yosida gradients written out by hand.
double neg_part(double v) { return v < 0.0 ? -v : 0.0; }
double pos_part(double v) { return v > 0.0 ? v : 0.0; }

Outcome c1_closed_forms() {
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> uy(-5.0, 5.0), ua(-3.0, 0.0), ub(0.0, 3.0), le(-6.0, 0.0);
  int mismatches = 0;
  double moreau = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double y = uy(rng), a = ua(rng), b = ub(rng), eps = std::pow(10.0, le(rng));
    const ConvexFunction lo = ConvexFunction::half_line_lower(a), hi = ConvexFunction::half_line_upper(b);
    // Written as a quotient: multiplying by a rounded 1 / eps would differ
    // from the same formula in the last bit.
    if (lo.yosida(eps, y) != -neg_part(y - a) / eps) ++mismatches;
    if (hi.yosida(eps, y) != pos_part(y - b) / eps) ++mismatches;
    // Moreau decomposition y = J_eps(y) + eps * grad phi_eps(y), and the
    // envelope of an indicator is the squared distance over 2 eps.
    for (const auto* f : {&lo, &hi}) {
      const ProxResult pr = f->prox(eps, y);
      moreau = std::max(moreau, std::abs(y - pr.resolvent_point - eps * pr.yosida_value));
      const double dist = f == &lo ? neg_part(y - a) : pos_part(y - b);
      moreau = std::max(moreau, std::abs(pr.envelope_value - dist * dist / (2.0 * eps)) / (1.0 + pr.envelope_value));
    }
  }
  return {mismatches == 0 && moreau < 1e-12,
          std::to_string(mismatches) + " mismatches, Moreau residual " + fmt(moreau) + " < 1e-12"};
}

Outcome c2_yosida_properties() {
  std::mt19937_64 rng(202);
  std::uniform_real_distribution<double> uy(-10.0, 10.0), le(-3.0, 0.0);
  double worst_mono = 0.0, worst_lip = 0.0;
  for (const auto& f : all_variants())
    for (int i = 0; i < 10000; ++i) {
      const double y1 = uy(rng), y2 = uy(rng), eps = std::pow(10.0, le(rng));
      const double g1 = f.yosida(eps, y1), g2 = f.yosida(eps, y2);
      worst_mono = std::max(worst_mono, -(y1 - y2) * (g1 - g2));
      worst_lip = std::max(worst_lip, std::abs(g1 - g2) - std::abs(y1 - y2) / eps);
    }
  return {worst_mono <= 1e-9 && worst_lip <= 1e-9,
          "monotonicity excess " + fmt(worst_mono) + ", Lipschitz excess " + fmt(worst_lip) + " <= 1e-9"};
}

Outcome c3_prox_step() {
  std::mt19937_64 rng(303);
  std::uniform_real_distribution<double> uv(-10.0, 10.0), le(-4.0, 0.0), lh(-4.0, 0.0);
  double worst = 0.0;
  for (const auto& f : all_variants())
    for (int i = 0; i < 1000; ++i) {
      const double v = uv(rng), eps = std::pow(10.0, le(rng)), h = std::pow(10.0, lh(rng));
      worst = std::max(worst, std::abs(f.backward_prox_step(eps, h, v) - backward_prox_step_bisection(f, eps, h, v)));
    }
  return {worst <= 1e-10, "max |identity - bisection| " + fmt(worst) + " <= 1e-10"};
}

struct SdeCheck {
  long outside = 0, decreasing = 0, interior_push = 0;
};

SdeCheck sde_invariants(const ProblemSpec& p, const Point& x0) {
  const PathBundle b = simulate(p, x0, TimeGrid(0.0, p.horizon(), 100), 10000, 404);
  SdeCheck c;
  for (int i = 0; i < b.n_paths; ++i)
    for (int k = 0; k <= b.grid.n_steps; ++k) {
      const Point x = b.X(k, i);
      if (!(p.domain().level(x) <= 1e-10)) ++c.outside;
      if (k < b.grid.n_steps) {
        if (b.A(k + 1, i) < b.A(k, i)) ++c.decreasing;
        if (b.dA(k, i) > 0.0 && std::abs(p.domain().level(b.X(k + 1, i))) > 1e-10) ++c.interior_push;
      }
    }
  return c;
}

Outcome c4_sde() {
  const SdeCheck ball = sde_invariants(presets::ball_diffusion(2), make_point({0.3, -0.2}));
  const SdeCheck iv = sde_invariants(presets::neumann_heat(), make_point({0.25}));
  const double T = 1.0, dt = T / 100;
  const ProblemSpec push(DomainSpec::interval(0.0, 1.0), Coefficients::constant(1, 1.0, 0.0), ConvexFunction::zero(),
                         ConvexFunction::zero(), T, AssumptionConstants{}, "outward_drift");
  const PathBundle b = simulate(push, make_point({1.0}), TimeGrid(0.0, T, 100), 4, 1);
  const double gap = std::abs(b.A(100, 0) - T);
  const long bad = ball.outside + ball.decreasing + ball.interior_push + iv.outside + iv.decreasing + iv.interior_push;
  return {bad == 0 && gap <= 2.0 * dt,
          std::to_string(bad) + " invariant violations on 2x10^4 paths, |A_T - T| " + fmt(gap) + " <= " + fmt(2.0 * dt)};
}

Outcome c5_heat() {
  const ProblemSpec p = presets::neumann_heat();
  const auto coeff = cosine_coefficients([&](double x) { return p.h(make_point({x})); }, 32);
  McConfig mc;
  mc.n_paths = 100000;
  mc.n_steps = 200;
  mc.substeps = 16;
  mc.solver.basis_degree = 3;
  const PointEstimate e = evaluate_point(p, 0.5, make_point({0.25}), mc, 505);
  const double exact = neumann_heat_series(0.25, 0.5, coeff, 32).value;
  const double err = std::abs(e.value - exact);
  const double tol = 3.0 * e.std_error + 5e-3;

  McConfig gmc = mc;
  gmc.n_paths = 10000;
  gmc.n_steps = 100;
  const std::vector<double> times{0.1, 0.2, 0.3, 0.4, 0.5};
  std::vector<Point> pts;
  for (int j = 0; j <= 8; ++j) pts.push_back(make_point({0.125 * j}));
  const SolutionGrid g = solve_grid(p, times, pts, gmc, 506);
  double sup = 0.0;
  for (std::size_t ti = 0; ti < times.size(); ++ti)
    for (std::size_t pj = 0; pj < pts.size(); ++pj)
      sup = std::max(sup, std::abs(g.value(ti, pj) - neumann_heat_series(pts[pj][0], times[ti], coeff, 32).value));
  return {err <= tol && sup <= 5e-2,
          "|u - series| " + fmt(err) + " <= " + fmt(tol) + " (SE " + fmt(e.std_error) + "), grid sup " + fmt(sup) +
              " <= 5e-2"};
}

Outcome c6_linear() {
  const double lambda0 = 1.0, T = 1.0;
  const ProblemSpec p = presets::linear_decay(lambda0, 1.0, T);
  McConfig mc;
  mc.n_paths = 8;
  mc.n_steps = 1000;
  const PointEstimate e = evaluate_point(p, T, make_point({0.0}), mc, 606);
  const double err = std::abs(e.value - std::exp(-lambda0 * T));
  return {err <= 1e-3, "|Y_0 - exp(-lambda0 T)| " + fmt(err) + " <= 1e-3"};
}

struct ObstacleGrid {
  SolutionGrid grid;
  CompareResult cmp;
};

const ObstacleGrid& obstacle_grid() {
  static const ObstacleGrid og = [] {
    const ProblemSpec p = presets::obstacle(1.0);
    McConfig mc;
    mc.n_paths = 10000;
    mc.n_steps = 100;
    mc.solver.eps = 1e-3;
    const std::vector<double> times{0.25, 0.5, 0.75, 1.0};
    std::vector<Point> pts;
    for (int j = 0; j <= 4; ++j) pts.push_back(make_point({0.25 * j}));
    ObstacleGrid out;
    out.grid = solve_grid(p, times, pts, mc, 707);
    const FdGrid fd = solve_penalized_fd(p, mc.solver.eps, 200, 400, 1.0);
    out.cmp = compare_at_nodes(to_grid_function(out.grid), to_grid_function(fd));
    return out;
  }();
  return og;
}

Outcome c7_obstacle() {
  const double eps = 1e-6;
  const ProblemSpec p = presets::obstacle(0.0).time_reversed();
  const PathBundle paths = simulate(p, make_point({0.5}), TimeGrid(0.0, p.horizon(), 100), 8, 708);
  SolverConfig cfg;
  cfg.eps = eps;
  const BackwardSolution sol = solve_backward(p, paths, cfg);
  double max_y = 0.0, max_u = 0.0;
  for (int k = 0; k <= paths.grid.n_steps; ++k)
    for (int i = 0; i < paths.n_paths; ++i) {
      max_y = std::max(max_y, std::abs(sol.y(k, i)));
      if (k < paths.grid.n_steps) max_u = std::max(max_u, std::abs(sol.u(k, i) + 1.0));
    }
  const double ytol = 1e-6 + 2.0 * std::sqrt(eps);
  const double fd_gap = obstacle_grid().cmp.sup;
  return {max_y <= ytol && max_u <= 1e-3 && fd_gap <= 5e-2,
          "max|Y| " + fmt(max_y) + " <= " + fmt(ytol) + ", max|U+1| " + fmt(max_u) + " <= 1e-3, FD gap " +
              fmt(fd_gap) + " <= 5e-2"};
}

Outcome c8_rate() {
  const ProblemSpec p = presets::obstacle(1.0);
  const ProblemSpec q = p.time_reversed();
  const PathBundle paths = simulate(q, make_point({0.5}), TimeGrid(0.0, q.horizon(), 100), 10000, 808);
  SolverConfig cfg;
  const SweepTable t = penalization_sweep(q, paths, {1e-1, 1e-2, 1e-3}, cfg, Weights{p.constants().lambda, p.constants().mu});
  const bool ok = t.slope_defined && t.slope_rms >= 0.3 && t.slope_rms <= 0.7;
  return {ok, "slope " + (t.slope_defined ? fmt(t.slope_rms) : std::string("undefined")) + " in [0.3, 0.7] (squared-distance slope " +
                  fmt(t.slope_sq) + ")"};
}

Outcome c9_contraction() {
  const ProblemSpec p = presets::neumann_heat().time_reversed();
  const PathBundle paths = simulate(p, make_point({0.3}), TimeGrid(0.0, p.horizon(), 50), 20000, 909);
  SolverConfig cfg;
  const ContractionReport r = contraction_experiment(
      p, paths, cfg, [](const Point& x) { return std::cos(M_PI * x[0]); },
      [](const Point& x) { return std::sin(3.0 * x[0]) + x[0] * x[0]; }, Weights{0.0, 0.0});
  const double bound = r.terminal_mean_sq * (1.0 + 1e-10);
  return {r.sup_mean_sq <= bound, "sup_k mean|dY|^2 " + fmt(r.sup_mean_sq) + " <= " + fmt(bound)};
}

Outcome c10_membership() {
  const ProblemSpec p = presets::obstacle(1.0);
  const MembershipReport rep = domain_membership_report(obstacle_grid().grid, p, 2.0);
  double worst = -std::numeric_limits<double>::infinity();
  const SolutionGrid& g = obstacle_grid().grid;
  for (std::size_t n = 0; n < g.values.size(); ++n)
    worst = std::max(worst, -(g.values[n] + 3.0 * g.std_errors[n] + 2.0 * std::sqrt(g.mc.solver.eps)));
  return {rep.all_passed() && worst <= 0.0,
          "max over nodes of -(u + 3 SE + 2 sqrt(eps)) " + fmt(worst) + " <= 0"};
}

Outcome c11_determinism() {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / ("pvi_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  const std::string cfg = (dir / "heat.json").string();
  write_file(cfg, R"({"version": 1, "preset": {"name": "neumann_heat"}, "monte_carlo": {"paths": 4000, "steps": 50}})");
  std::vector<std::string> digests;
  const char* saved = std::getenv("PVI_NUM_THREADS");
  const std::string saved_value = saved ? saved : "";
  int failures = 0;
  for (const char* w : {"1", "4", "8"}) {
    setenv("PVI_NUM_THREADS", w, 1);
    const std::string out = (dir / (std::string("w") + w)).string();
    const int rc = run_cli({"solve", cfg, "--seed", "1111", "--grid", "t=0.1,0.5;x=0,0.3,1", "--out", out});
    if (rc != 0) ++failures;
    else digests.push_back(sha256_file(out + "/grid.csv"));
  }
  if (saved) setenv("PVI_NUM_THREADS", saved_value.c_str(), 1);
  else unsetenv("PVI_NUM_THREADS");
  fs::remove_all(dir);
  const bool same = failures == 0 && digests.size() == 3 && digests[0] == digests[1] && digests[1] == digests[2];
  return {same, same ? "grid.csv sha256 " + digests[0].substr(0, 16) + "... identical for 1, 4, 8 workers"
                     : "grid.csv differs across worker counts or a run failed"};
}

ProblemSpec indicator_problem(const std::string& g) {
  Coefficients c = Coefficients::constant(1, 0.0, 1.0);
  c.f = Expression::parse("-y");
  c.g = Expression::parse(g);
  c.h = Expression::constant(0.0);
  AssumptionConstants k;
  k.gamma = 1.0;
  return ProblemSpec(DomainSpec::interval(0.0, 1.0), std::move(c), ConvexFunction::half_line_lower(-1.0),
                     ConvexFunction::half_line_upper(1.0), 1.0, k, "indicator_pair");
}

Outcome c12_compatibility() {
  const std::vector<double> eps{1e-1, 1e-2, 1e-3};
  const CompatReport good = check_compatibility(indicator_problem("-y"), eps, 1000, 1212);
  const CompatReport bad = check_compatibility(indicator_problem("-1"), eps, 1000, 1212);
  const bool ok = good.all_passed() && !bad.boundary_g.passed && bad.boundary_g.margin > 0.0;
  return {ok, std::string("indicator pair ") + (good.all_passed() ? "passes" : "FAILS") + ", g = -1 boundary margin " +
                  fmt(bad.boundary_g.margin) + " > 0"};
}

}  // namespace

int main(int argc, char** argv) {
  bool strict = false;
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--strict") strict = true;
    else if (a == "--only" && i + 1 < argc) only = std::atoi(argv[++i]);
    else {
      std::fprintf(stderr, "usage: acceptance [--strict] [--only N]\n");
      return 2;
    }
  }

  const std::vector<Criterion> criteria = {
      {1, "convex closed forms", 1.0, c1_closed_forms},
      {2, "Yosida monotone and 1/eps-Lipschitz", 5.0, c2_yosida_properties},
      {3, "prox step identity vs bisection", 5.0, c3_prox_step},
      {4, "reflected SDE invariants", 30.0, c4_sde},
      {5, "Neumann heat vs cosine series", 300.0, c5_heat},
      {6, "linear generator", 10.0, c6_linear},
      {7, "deterministic obstacle and FD oracle", 120.0, c7_obstacle},
      {8, "penalization rate slope", 300.0, c8_rate},
      {9, "contraction", 60.0, c9_contraction},
      {10, "domain membership", 120.0, c10_membership},
      {11, "determinism across worker counts", 120.0, c11_determinism},
      {12, "compatibility validator", 5.0, c12_compatibility},
  };

  int unexpected = 0, failed = 0;
  for (const auto& c : criteria) {
    if (only && c.id != only) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs <= c.time_limit_s;
    const bool pass = o.passed && in_time;
    std::printf("criterion %2d %s: %s; %.1f s <= %.0f s%s\n", c.id, pass ? "PASS" : "FAIL", c.title, secs,
                c.time_limit_s, (o.detail.empty() ? "" : ("; " + o.detail).c_str()));
    std::fflush(stdout);
    if (!pass) {
      ++failed;
      if (!kKnownRed.count(c.id)) ++unexpected;
    }
  }
  if (strict) return failed ? 1 : 0;
  return unexpected ? 1 : 0;
}
