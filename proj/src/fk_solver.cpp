#include "pvi/fk_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "pvi/errors.hpp"

namespace pvi {

namespace {

constexpr double kBoundaryTol = 1e-10;

std::string point_str(const Point& x) {
  std::ostringstream os;
  os << "(";
  for (Eigen::Index i = 0; i < x.size(); ++i) os << (i ? ", " : "") << x[i];
  os << ")";
  return os.str();
}

void check_point(const ProblemSpec& p, const Point& x) {
  if (x.size() != p.dimension())
    throw PreconditionError("point " + point_str(x) + " has dimension " + std::to_string(x.size()) +
                            ", expected " + std::to_string(p.dimension()));
  if (!(p.domain().level(x) <= kBoundaryTol)) throw DomainError("point " + point_str(x) + " lies outside the closed domain");
}

PointEstimate run(const ProblemSpec& q, const Point& x, const TimeGrid& grid, const McConfig& mc,
                  std::uint64_t seed, std::uint32_t stream) {
  SimulationOptions opts;
  opts.substeps = mc.substeps;
  opts.stream = stream;
  const PathBundle paths = simulate(q, x, grid, mc.n_paths, seed, opts);
  const BackwardSolution sol = solve_backward(q, paths, mc.solver);
  const MeanSe est = sol.estimate();
  PointEstimate out;
  out.value = est.mean;
  out.std_error = est.se;
  out.max_residual = sol.max_residual;
  out.stability_warning = sol.stability_warning;
  return out;
}

}  // namespace

PointEstimate evaluate_point(const ProblemSpec& p, double t, const Point& x, const McConfig& mc,
                             std::uint64_t seed, std::uint32_t stream) {
  const double T = p.horizon();
  if (!(t >= 0.0 && t <= T)) throw PreconditionError("evaluate_point: t must lie in [0, T]");
  check_point(p, x);
  if (t == 0.0) {
    PointEstimate out;
    out.value = p.h(x);
    out.pinned = true;
    return out;
  }
  const ProblemSpec q = p.reversed() ? p : p.time_reversed();
  return run(q, x, TimeGrid(T - t, T, mc.n_steps), mc, seed, stream);
}

PointEstimate evaluate_point_autonomous(const ProblemSpec& p, double t, const Point& x, const McConfig& mc,
                                        std::uint64_t seed, std::uint32_t stream) {
  if (!p.autonomous()) throw PreconditionError("evaluate_point_autonomous: coefficients depend on time");
  if (!(t >= 0.0 && t <= p.horizon())) throw PreconditionError("evaluate_point_autonomous: t must lie in [0, T]");
  check_point(p, x);
  if (t == 0.0) {
    PointEstimate out;
    out.value = p.h(x);
    out.pinned = true;
    return out;
  }
  return run(p, x, TimeGrid(0.0, t, mc.n_steps), mc, seed, stream);
}

SolutionGrid solve_grid(const ProblemSpec& p, const std::vector<double>& times, const std::vector<Point>& points,
                        const McConfig& mc, std::uint64_t seed) {
  if (times.empty() || points.empty()) throw PreconditionError("solve_grid: grids must be nonempty");
  for (double t : times)
    if (!(t >= 0.0 && t <= p.horizon())) throw PreconditionError("solve_grid: time " + std::to_string(t) + " outside [0, T]");
  for (const Point& x : points) check_point(p, x);

  SolutionGrid g;
  g.times = times;
  g.points = points;
  g.mc = mc;
  g.seed = seed;
  for (const Point& x : points) g.boundary.push_back(std::abs(p.domain().level(x)) <= kBoundaryTol);
  g.values.resize(times.size() * points.size());
  g.std_errors.resize(g.values.size());
  // Nodes run one after another; each solve is parallel over paths inside.
  for (std::size_t ti = 0; ti < times.size(); ++ti)
    for (std::size_t pj = 0; pj < points.size(); ++pj) {
      const auto stream = static_cast<std::uint32_t>(g.index(ti, pj));
      const PointEstimate e = evaluate_point(p, times[ti], points[pj], mc, seed, stream);
      g.values[g.index(ti, pj)] = e.value;
      g.std_errors[g.index(ti, pj)] = e.std_error;
      g.max_residual = std::max(g.max_residual, e.max_residual);
      g.stability_warning = g.stability_warning || e.stability_warning;
    }
  return g;
}

bool MembershipReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const MembershipCheck& c) { return c.passed; });
}

MembershipReport domain_membership_report(const SolutionGrid& sol, const ProblemSpec& p, double kappa) {
  MembershipReport rep;
  rep.kappa = kappa;
  const double pen = kappa * std::sqrt(sol.mc.solver.eps);

  auto check = [&](const std::string& name, const ConvexFunction& f, bool boundary_only) {
    const auto [lower, upper] = f.domain();
    for (int side = 0; side < 2; ++side) {
      const ExtReal bound = side == 0 ? lower : upper;
      MembershipCheck c;
      c.name = name + (side == 0 ? "_lower" : "_upper");
      c.applicable = bound.is_finite();
      c.min_margin = std::numeric_limits<double>::infinity();
      if (c.applicable) {
        for (std::size_t ti = 0; ti < sol.times.size(); ++ti)
          for (std::size_t pj = 0; pj < sol.points.size(); ++pj) {
            if (boundary_only && !sol.boundary[pj]) continue;
            const std::size_t idx = sol.index(ti, pj);
            const double u = sol.values[idx];
            const double margin = side == 0 ? u - bound.value() : bound.value() - u;
            if (margin < c.min_margin) {
              c.min_margin = margin;
              c.worst_node = idx;
            }
            if (margin < -(3.0 * sol.std_errors[idx] + pen)) c.passed = false;
          }
      }
      if (!std::isfinite(c.min_margin)) c.min_margin = 0.0;
      rep.checks.push_back(c);
    }
  };
  check("phi", p.phi(), false);
  check("psi", p.psi(), true);
  return rep;
}

ContinuityReport continuity_report(const SolutionGrid& sol) {
  ContinuityReport rep;
  const std::size_t nt = sol.times.size(), np = sol.points.size();
  if (nt * np <= 1) return rep;
  rep.empty = false;
  for (double se : sol.std_errors) rep.max_std_error = std::max(rep.max_std_error, se);
  for (std::size_t ti = 0; ti + 1 < nt; ++ti)
    for (std::size_t pj = 0; pj < np; ++pj) {
      const double jump = std::abs(sol.value(ti + 1, pj) - sol.value(ti, pj));
      const double gap = std::abs(sol.times[ti + 1] - sol.times[ti]);
      rep.max_jump_t = std::max(rep.max_jump_t, jump);
      if (gap > 0.0) rep.max_slope_t = std::max(rep.max_slope_t, jump / gap);
    }
  for (std::size_t ti = 0; ti < nt; ++ti)
    for (std::size_t pj = 0; pj + 1 < np; ++pj) {
      const double jump = std::abs(sol.value(ti, pj + 1) - sol.value(ti, pj));
      const double gap = (sol.points[pj + 1] - sol.points[pj]).norm();
      rep.max_jump_x = std::max(rep.max_jump_x, jump);
      if (gap > 0.0) rep.max_slope_x = std::max(rep.max_slope_x, jump / gap);
    }
  return rep;
}

}  // namespace pvi
