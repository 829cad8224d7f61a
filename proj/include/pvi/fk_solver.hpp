#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pvi/bsvi.hpp"

namespace pvi {

struct McConfig {
  int n_paths = 10000;
  int n_steps = 100;
  int substeps = 1;
  SolverConfig solver;
};

struct PointEstimate {
  double value = 0.0;
  double std_error = 0.0;
  bool pinned = false;  // t = 0: the initial condition, not an estimate
  double max_residual = 0.0;
  bool stability_warning = false;
};

// u(t, x) for the forward problem: reflected paths from x over [T - t, T]
// driven by the time-reversed coefficients, then the backward solve with
// terminal h(X_T). Returns Y at the start time; t = 0 returns h(x) exactly.
PointEstimate evaluate_point(const ProblemSpec& p, double t, const Point& x, const McConfig& mc,
                             std::uint64_t seed, std::uint32_t stream = 0);

// Same value through the horizon-t formulation available when b, sigma, f, g
// do not depend on time: paths over [0, t] under the original coefficients.
PointEstimate evaluate_point_autonomous(const ProblemSpec& p, double t, const Point& x, const McConfig& mc,
                                        std::uint64_t seed, std::uint32_t stream = 0);

struct SolutionGrid {
  std::vector<double> times;
  std::vector<Point> points;
  std::vector<bool> boundary;      // per point
  std::vector<double> values;      // times.size() x points.size(), time-major
  std::vector<double> std_errors;
  McConfig mc;
  std::uint64_t seed = 0;
  double max_residual = 0.0;
  bool stability_warning = false;

  std::size_t index(std::size_t ti, std::size_t pj) const { return ti * points.size() + pj; }
  double value(std::size_t ti, std::size_t pj) const { return values[index(ti, pj)]; }
  double std_error(std::size_t ti, std::size_t pj) const { return std_errors[index(ti, pj)]; }
};

// One independent backward solve per node; node (ti, pj) draws from stream
// ti * points.size() + pj. Throws DomainError naming the first point outside
// the closed domain, PreconditionError for times outside [0, T].
SolutionGrid solve_grid(const ProblemSpec& p, const std::vector<double>& times, const std::vector<Point>& points,
                        const McConfig& mc, std::uint64_t seed);

struct MembershipCheck {
  std::string name;
  bool applicable = false;
  bool passed = true;
  double min_margin = 0.0;  // min over nodes of the signed distance to the bound
  std::size_t worst_node = 0;
};

struct MembershipReport {
  double kappa = 2.0;
  std::vector<MembershipCheck> checks;
  bool all_passed() const;
};

// u in Dom(phi) at every node and u in Dom(psi) at boundary nodes, each with
// slack 3 SE + kappa sqrt(eps). Functions with full domain pass vacuously.
MembershipReport domain_membership_report(const SolutionGrid& sol, const ProblemSpec& p, double kappa = 2.0);

struct ContinuityReport {
  bool empty = true;
  double max_jump_t = 0.0;   // max |u(t_{i+1}, x) - u(t_i, x)|
  double max_jump_x = 0.0;   // max |u(t, x_{j+1}) - u(t, x_j)| in point order
  double max_slope_t = 0.0;  // jumps over spacing
  double max_slope_x = 0.0;
  double max_std_error = 0.0;
};

ContinuityReport continuity_report(const SolutionGrid& sol);

}  // namespace pvi
