#pragma once

#include <cstdint>
#include <vector>

#include "pvi/problem.hpp"
#include "pvi/stats.hpp"

namespace pvi {

struct TimeGrid {
  double t0 = 0.0;
  double T = 1.0;
  int n_steps = 1;

  TimeGrid() = default;
  TimeGrid(double t0_, double T_, int n);
  double dt() const { return (T - t0) / n_steps; }
  double t(int k) const { return k == n_steps ? T : t0 + k * dt(); }
};

struct SimulationOptions {
  // Euler substeps per grid step; increments are summed onto the grid.
  int substeps = 1;
  // Separates independent families drawn from one seed (e.g. grid nodes).
  std::uint32_t stream = 0;
};

// Time-major storage: entry (k, path) of a per-path quantity lives at
// k * n_paths + path, with d consecutive doubles for vector quantities.
struct PathBundle {
  TimeGrid grid;
  int n_paths = 0;
  int dim = 1;
  int substeps = 1;
  std::uint64_t seed = 0;
  std::uint32_t stream = 0;
  std::vector<double> states;      // (n_steps + 1) * n_paths * d
  std::vector<double> local_time;  // (n_steps + 1) * n_paths
  std::vector<double> increments;  // n_steps * n_paths * d

  std::size_t slot(int k, int i) const {
    return static_cast<std::size_t>(k) * static_cast<std::size_t>(n_paths) + static_cast<std::size_t>(i);
  }
  Point X(int k, int i) const;
  Point dW(int k, int i) const;
  double A(int k, int i) const { return local_time[slot(k, i)]; }
  double dA(int k, int i) const { return A(k + 1, i) - A(k, i); }
};

// Projected Euler scheme for the reflected diffusion
//   dX = b(s, X) ds + sigma(s, X) dW - grad(level)(X) dA,  X_t0 = x0.
// Coefficients are read through ProblemSpec::b / sigma at time s, so a
// time-reversed problem yields the backward-frame dynamics. Paths are
// distributed over OpenMP threads; output does not depend on the thread count.
PathBundle simulate(const ProblemSpec& p, const Point& x0, const TimeGrid& grid, int n_paths,
                    std::uint64_t seed, const SimulationOptions& opts = {});
// Single-threaded reference with identical arithmetic.
PathBundle simulate_serial(const ProblemSpec& p, const Point& x0, const TimeGrid& grid, int n_paths,
                           std::uint64_t seed, const SimulationOptions& opts = {});

// Nearest boundary point for an exterior point: closed form for the presets.
Projection project(const DomainSpec& domain, const Point& y);

// Monte Carlo mean of exp(mu A_T) with its standard error.
MeanSe estimate_exp_local_time(const PathBundle& paths, double mu);

// E sup_k |X_k^{t,x} - X_k^{t',x'}|^p_exp with both paths driven by the same
// increments on a grid over [min(t, t'), T]; the later start is held at its
// initial point until its start time, which must be a grid node.
double continuity_modulus_experiment(const ProblemSpec& p, double t, const Point& x, double tp,
                                     const Point& xp, double p_exp, int n_paths, int n_steps,
                                     std::uint64_t seed, const SimulationOptions& opts = {});

}  // namespace pvi
