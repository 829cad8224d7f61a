#pragma once

#include <functional>
#include <vector>

#include "pvi/fk_solver.hpp"
#include "pvi/problem.hpp"

namespace pvi {

// Reference solutions computed with deterministic numerics. Apart from the
// convex toolkit and the problem description they share no code with the
// Monte Carlo pipeline.

struct SeriesValue {
  double value = 0.0;
  double tail_bound = 0.0;  // sum of |c_k| e^{-k^2 pi^2 t / 2} over the dropped supplied modes
};

// sum_{k < n_terms} c_k exp(-k^2 pi^2 t / 2) cos(k pi x) on [0, 1]: the
// Neumann problem for u_t = u_xx / 2 with u(0, .) = sum c_k cos(k pi .).
SeriesValue neumann_heat_series(double x, double t, const std::vector<double>& mode_coeffs, int n_terms);

// c_0 = int h, c_k = 2 int h cos(k pi x) over [0, 1], composite Simpson with
// n_intervals (even) subintervals.
std::vector<double> cosine_coefficients(const std::function<double(double)>& h, int n_modes, int n_intervals = 4096);

struct FdGrid {
  std::vector<double> x;       // nx + 1 nodes
  std::vector<double> t;       // nt + 1 levels
  std::vector<double> values;  // (nt + 1) x (nx + 1), time-major
  double theta = 1.0;
  double cfl = 0.0;            // max sigma^2 dt / dx^2

  double at(std::size_t m, std::size_t j) const { return values[m * x.size() + j]; }
};

// theta-scheme for u_t = sigma^2 u_xx / 2 + b u_x - grad phi_eps(u) + f(t, x, u, sigma u_x)
// on an interval, boundary du/dn + grad psi_eps(u) = g through ghost nodes.
// f and g are explicit; the grad psi_eps boundary term and the grad phi_eps
// term are applied as backward prox steps after the linear solve.
FdGrid solve_penalized_fd(const ProblemSpec& p, double eps, int nx, int nt, double theta);

struct ViMode {
  bool exact = false;  // multivalued phi, psi: projection onto the domains
  double eps = 1e-3;   // used when !exact
};

struct Trajectory {
  std::vector<double> s;  // backward-frame times s_0 .. T
  std::vector<double> x;  // states, d per time
  std::vector<double> A;
  std::vector<double> Y;
  std::vector<double> U;
  int dim = 1;
};

// Zero-noise backward problem along the deterministic reflected path from x0
// over grid: Strang splitting with half prox steps around an RK4 step for f.
// In exact mode phi and psi must be indicators; Y is projected onto their
// domains and U is the implied multiplier. Coefficients are read at the grid
// time, as in simulate().
Trajectory solve_deterministic_vi(const ProblemSpec& p, const Point& x0, double s0, int nt, const ViMode& mode);

// A scalar field on a tensor grid in (t, x), d = 1. A single node on an axis
// means the field is only known there.
struct GridFunction {
  std::vector<double> t;
  std::vector<double> x;
  std::vector<double> values;  // t-major
};

GridFunction to_grid_function(const SolutionGrid& sol);
GridFunction to_grid_function(const FdGrid& fd);

struct CompareRow {
  double t, x, a, b, diff;
};

struct CompareResult {
  double sup = 0.0;
  double l2 = 0.0;  // root mean square over the compared nodes
  std::vector<CompareRow> table;
};

// Both fields are linearly interpolated onto the union of their nodes within
// the overlap of their supports. ShapeError when the supports are disjoint.
CompareResult compare(const GridFunction& a, const GridFunction& b);
// b interpolated onto the nodes of a that lie in b's support. For a coarse
// Monte Carlo grid against a fine reference this avoids scoring the
// interpolation error of the coarse grid.
CompareResult compare_at_nodes(const GridFunction& a, const GridFunction& b);

}  // namespace pvi
