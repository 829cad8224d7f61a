#pragma once

#include <functional>
#include <string>
#include <vector>

#include "pvi/problem.hpp"
#include "pvi/reflected_sde.hpp"
#include "pvi/regression.hpp"

namespace pvi {

struct SolverConfig {
  double eps = 1e-3;
  int basis_degree = 3;
  double implicit_tol = 1e-12;
  int implicit_max_iter = 200;
  // Accepted for configuration compatibility. The scheme is explicit in z and
  // implicit in y, so there is nothing left for a Picard sweep to update.
  int picard_iters = 1;
  // dt / eps above this value is allowed but flagged.
  double stability_cap = 10.0;
  bool parallel = true;

  void validate() const;
};

using TerminalMap = std::function<double(const Point&)>;

struct BackwardSolution {
  TimeGrid grid;
  int n_paths = 0;
  int dim = 1;
  double eps = 0.0;
  std::vector<double> Y;  // (n_steps + 1) * n_paths, time-major
  std::vector<double> Z;  // n_steps * n_paths * d
  std::vector<double> U;  // grad phi_eps(Y)
  std::vector<double> V;  // grad psi_eps(Y)
  // xi + sum_k (Y_k - E_k[Y_{k+1}]) per path; its mean tracks Y_0 and its
  // spread gives the Monte Carlo standard error.
  std::vector<double> pathwise;
  std::vector<RegressionDiagnostics> regression;  // per step k < n_steps
  double max_residual = 0.0;
  bool stability_warning = false;
  std::vector<std::string> warnings;

  std::size_t slot(int k, int i) const {
    return static_cast<std::size_t>(k) * static_cast<std::size_t>(n_paths) + static_cast<std::size_t>(i);
  }
  double y(int k, int i) const { return Y[slot(k, i)]; }
  double u(int k, int i) const { return U[slot(k, i)]; }
  double v(int k, int i) const { return V[slot(k, i)]; }
  double z(int k, int i, int c) const { return Z[slot(k, i) * static_cast<std::size_t>(dim) + c]; }

  // Mean of Y_0 with the standard error of the pathwise representation.
  MeanSe estimate() const;
};

// Backward Euler for the penalised equation
//   Y_k + dt U(Y_k) + dA_k V(Y_k) - dt f(s_k, X_k, Y_k, Z_k) - dA_k g(s_k, X_k, Y_k) = E_k[Y_{k+1}]
//   Z_k = E_k[(Y_{k+1} - E_k[Y_{k+1}]) dW_k] / dt,   Y_N = xi(X_N)  (h by default)
// with conditional expectations by regression on the states X_k. Coefficients
// are evaluated at s_k through the ProblemSpec, as for simulate().
BackwardSolution solve_backward(const ProblemSpec& p, const PathBundle& paths, const SolverConfig& cfg,
                                const TerminalMap& terminal = {});
// Same arithmetic on one thread.
BackwardSolution solve_backward_serial(const ProblemSpec& p, const PathBundle& paths, SolverConfig cfg,
                                       const TerminalMap& terminal = {});

// Scalar implicit step: the root of
//   y + dt grad phi_eps(y) + da grad psi_eps(y) - dt f(s, x, y, z) - da g(s, x, y) = e.
struct ImplicitStep {
  double y = 0.0;
  double residual = 0.0;
  int iterations = 0;
};
ImplicitStep solve_implicit(const ProblemSpec& p, const SolverConfig& cfg, double s, const Point& x,
                            const Point& z, double dt, double da, double e);

// Weight exp(lambda (s_k - s_0) + mu A_k).
struct Weights {
  double lambda = 0.0;
  double mu = 0.0;
};

struct ContractionReport {
  double weighted_sup = 0.0;        // E sup_k w_k |Y_k - Y~_k|^2
  double weighted_terminal = 0.0;   // E w_N |xi - xi~|^2
  double ratio = 0.0;               // weighted_sup / weighted_terminal
  double sup_mean_sq = 0.0;         // sup_k mean |Y_k - Y~_k|^2
  double terminal_mean_sq = 0.0;    // mean |xi - xi~|^2
  std::vector<double> mean_sq_by_step;
};

ContractionReport contraction_experiment(const ProblemSpec& p, const PathBundle& paths, const SolverConfig& cfg,
                                         const TerminalMap& xi_a, const TerminalMap& xi_b, Weights w);

struct SweepPair {
  double eps;
  double delta;
  double weighted_sup_sq;  // E sup_k w_k |Y^eps_k - Y^delta_k|^2
  double rms;              // square root of the above
  double bound_ratio;      // weighted_sup_sq / ((eps + delta) M)
};

struct SweepTable {
  std::vector<double> eps_list;
  std::vector<double> estimates;  // Y_0 per eps
  std::vector<SweepPair> pairs;
  double slope_rms = 0.0;  // least-squares slope of log rms vs log(eps + delta); NaN if undefined
  double slope_sq = 0.0;   // same for the squared distance
  bool slope_defined = false;
  double M = 0.0;
};

// eps_list must be strictly decreasing with at least three entries.
SweepTable penalization_sweep(const ProblemSpec& p, const PathBundle& paths, const std::vector<double>& eps_list,
                              const SolverConfig& cfg, Weights w);

// Weighted data term of the a-priori estimates:
//   E w_N (|xi|^2 + phi(xi) + psi(xi)) + E sum_k w_k (gamma^2 dt + gamma^2 dA_k)
double data_bound(const ProblemSpec& p, const PathBundle& paths, Weights w, const TerminalMap& terminal = {});

struct BoundsEntry {
  std::string name;
  double lhs = 0.0;
  double ratio = 0.0;  // lhs / M (lhs / (eps M) for the penetration term)
};

struct BoundsReport {
  double M = 0.0;
  std::vector<BoundsEntry> entries;
  const BoundsEntry* find(const std::string& name) const;
};

// Empirical left-hand sides:
//   y_energy             E[sup w|Y|^2 + sum w(|Y|^2 + |Z|^2) dt + sum w|Y|^2 dA]
//   yosida_energy        E sum w (|U|^2 dt + |V|^2 dA)
//   convex_energy        E sum w (phi(J Y) dt + psi(J^ Y) dA)
//   penetration          max_k E w_k (|Y - J Y|^2 + |Y - J^ Y|^2)   (ratio to eps M)
//   convex_pointwise     max_k E w_k (phi(J Y) + psi(J^ Y))
BoundsReport apriori_bounds_report(const BackwardSolution& sol, const ProblemSpec& p, const PathBundle& paths,
                                   Weights w);

}  // namespace pvi
