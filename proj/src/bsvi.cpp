#include "pvi/bsvi.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "pvi/errors.hpp"
#include "pvi/parallel.hpp"

namespace pvi {

namespace {

double terminal_value(const ProblemSpec& p, const TerminalMap& xi, const Point& x) {
  return xi ? xi(x) : p.h(x);
}

double weight(const Weights& w, const PathBundle& paths, int k, int i) {
  return std::exp(w.lambda * (paths.grid.t(k) - paths.grid.t0) + w.mu * paths.A(k, i));
}

double convex_value(const ConvexFunction& f, double y) {
  const ExtReal v = f.evaluate(y);
  return v.is_finite() ? v.value() : std::numeric_limits<double>::infinity();
}

// Least-squares slope of ys against xs.
double ols_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  return sxy / sxx;
}

BackwardSolution solve_impl(const ProblemSpec& p, const PathBundle& paths, const SolverConfig& cfg,
                            const TerminalMap& terminal) {
  cfg.validate();
  if (paths.dim != p.dimension()) throw PreconditionError("solve_backward: paths and problem differ in dimension");
  const int n = paths.n_paths;
  const int N = paths.grid.n_steps;
  const int d = paths.dim;
  const double dt = paths.grid.dt();
  const double eps = cfg.eps;
  const bool par = cfg.parallel;

  BackwardSolution sol;
  sol.grid = paths.grid;
  sol.n_paths = n;
  sol.dim = d;
  sol.eps = eps;
  const auto nn = static_cast<std::size_t>(n);
  sol.Y.assign((static_cast<std::size_t>(N) + 1) * nn, 0.0);
  sol.U.assign(sol.Y.size(), 0.0);
  sol.V.assign(sol.Y.size(), 0.0);
  sol.Z.assign(static_cast<std::size_t>(N) * nn * static_cast<std::size_t>(d), 0.0);
  sol.pathwise.assign(nn, 0.0);
  sol.regression.resize(static_cast<std::size_t>(N));
  if (dt / eps > cfg.stability_cap) {
    sol.stability_warning = true;
    std::ostringstream os;
    os << "dt / eps = " << dt / eps << " exceeds the stability cap " << cfg.stability_cap;
    sol.warnings.push_back(os.str());
  }

  auto run = [&](int count, auto&& fn) {
    if (par) parallel_for(count, fn); else serial_for(count, fn);
  };

  run(n, [&](int i) {
    const double xi = terminal_value(p, terminal, paths.X(N, i));
    if (!std::isfinite(xi)) throw EvalError("terminal value is not finite");
    const std::size_t s = sol.slot(N, i);
    sol.Y[s] = xi;
    sol.U[s] = p.phi().yosida(eps, xi);
    sol.V[s] = p.psi().yosida(eps, xi);
    sol.pathwise[static_cast<std::size_t>(i)] = xi;
  });

  std::vector<double> residual(nn, 0.0);
  Eigen::MatrixXd ytarget(n, 1), ztargets(n, d);
  for (int k = N - 1; k >= 0; --k) {
    run(n, [&](int i) { ytarget(i, 0) = sol.Y[sol.slot(k + 1, i)]; });
    const Regressor reg(p.domain(), paths, k, cfg.basis_degree, par);
    const Eigen::MatrixXd yfit = reg.fit(ytarget, &sol.regression[static_cast<std::size_t>(k)]);
    // Centring Y_{k+1} on its conditional mean removes the sampling noise of
    // the increments from Z; a constant Y gives Z = 0 exactly.
    run(n, [&](int i) {
      const double y1 = ytarget(i, 0) - yfit(i, 0);
      const std::size_t w = paths.slot(k, i) * static_cast<std::size_t>(d);
      for (int c = 0; c < d; ++c) ztargets(i, c) = y1 * paths.increments[w + static_cast<std::size_t>(c)];
    });
    const Eigen::MatrixXd zfit = reg.fit(ztargets);
    const double s_k = paths.grid.t(k);

    run(n, [&](int i) {
      const Point x = paths.X(k, i);
      Point z(d);
      for (int c = 0; c < d; ++c) z[c] = zfit(i, c) / dt;
      const double e = yfit(i, 0);
      const ImplicitStep step = solve_implicit(p, cfg, s_k, x, z, dt, paths.dA(k, i), e);
      const std::size_t s = sol.slot(k, i);
      sol.Y[s] = step.y;
      sol.U[s] = p.phi().yosida(eps, step.y);
      sol.V[s] = p.psi().yosida(eps, step.y);
      for (int c = 0; c < d; ++c) sol.Z[s * static_cast<std::size_t>(d) + static_cast<std::size_t>(c)] = z[c];
      sol.pathwise[static_cast<std::size_t>(i)] += step.y - e;
      residual[static_cast<std::size_t>(i)] = std::max(residual[static_cast<std::size_t>(i)], step.residual);
    });
  }
  sol.max_residual = *std::max_element(residual.begin(), residual.end());
  return sol;
}

}  // namespace

void SolverConfig::validate() const {
  if (!(eps > 0.0 && std::isfinite(eps))) throw PreconditionError("eps must be positive");
  if (basis_degree < 0 || basis_degree > 8) throw PreconditionError("basis_degree must be in [0, 8]");
  if (!(implicit_tol > 0.0)) throw PreconditionError("implicit_tol must be positive");
  if (implicit_max_iter < 1) throw PreconditionError("implicit_max_iter must be >= 1");
  if (picard_iters < 1) throw PreconditionError("picard_iters must be >= 1");
  if (!(stability_cap > 0.0)) throw PreconditionError("stability_cap must be positive");
}

MeanSe BackwardSolution::estimate() const {
  std::vector<double> y0(Y.begin(), Y.begin() + n_paths);
  MeanSe out;
  out.mean = pairwise_sum(y0) / n_paths;
  out.se = mean_se(pathwise).se;
  return out;
}

ImplicitStep solve_implicit(const ProblemSpec& p, const SolverConfig& cfg, double s, const Point& x,
                            const Point& z, double dt, double da, double e) {
  const ConvexFunction& phi = p.phi();
  const ConvexFunction& psi = p.psi();
  const double eps = cfg.eps;
  const bool boundary = da > 0.0;

  auto residual_of = [&](double y) {
    double r = y + dt * phi.yosida(eps, y) - dt * p.f(s, x, y, z) - e;
    if (boundary) r += da * (psi.yosida(eps, y) - p.g(s, x, y));
    return r;
  };

  ImplicitStep out;
  if (p.generator_free_of_y() && (!boundary || phi.is_zero() || psi.is_zero())) {
    // Reduces to one backward prox step on the shifted right-hand side.
    double v = e + dt * p.f(s, x, 0.0, z);
    if (boundary) v += da * p.g(s, x, 0.0);
    if (!boundary || psi.is_zero()) out.y = phi.backward_prox_step(eps, dt, v);
    else out.y = psi.backward_prox_step(eps, da, v);
    out.residual = std::abs(residual_of(out.y));
    return out;
  }

  const double scale = std::max(1.0, std::abs(e));
  const double tol = cfg.implicit_tol * scale;
  double y0 = e;
  double f0 = residual_of(y0);
  out.iterations = 1;
  if (!std::isfinite(f0)) throw ImplicitSolveError("implicit step: residual is not finite at the start point");
  if (std::abs(f0) <= tol) {
    out.y = y0;
    out.residual = std::abs(f0);
    return out;
  }

  // Expand a bracket away from e until the residual changes sign.
  double lo = y0, hi = y0, flo = f0, fhi = f0;
  double width = scale;
  bool bracketed = false;
  for (int it = 0; it < 64 && !bracketed; ++it, width *= 2.0) {
    const double y = f0 > 0.0 ? y0 - width : y0 + width;
    const double fy = residual_of(y);
    ++out.iterations;
    if (!std::isfinite(fy)) break;
    if (f0 > 0.0) {
      lo = y;
      flo = fy;
      bracketed = fy <= 0.0;
    } else {
      hi = y;
      fhi = fy;
      bracketed = fy >= 0.0;
    }
  }
  if (!bracketed) {
    std::ostringstream os;
    os << "implicit step: no sign change around e = " << e << " (dt = " << dt << ", dA = " << da
       << "); the step is too large for the monotonicity constants";
    throw ImplicitSolveError(os.str());
  }
  if (flo == 0.0) return {lo, 0.0, out.iterations};
  if (fhi == 0.0) return {hi, 0.0, out.iterations};

  // Illinois regula falsi, with a bisection whenever the bracket fails to halve.
  int side = 0;
  double best = std::abs(flo) < std::abs(fhi) ? lo : hi;
  double best_r = std::min(std::abs(flo), std::abs(fhi));
  double prev_width = hi - lo;
  for (int it = 0; it < cfg.implicit_max_iter; ++it) {
    double y = (lo * fhi - hi * flo) / (fhi - flo);
    if (!(y > lo && y < hi) || (it % 3 == 2 && hi - lo > 0.5 * prev_width)) y = 0.5 * (lo + hi);
    if (it % 3 == 2) prev_width = hi - lo;
    const double fy = residual_of(y);
    ++out.iterations;
    if (std::abs(fy) < best_r) {
      best = y;
      best_r = std::abs(fy);
    }
    if (std::abs(fy) <= tol) return {y, std::abs(fy), out.iterations};
    if (fy < 0.0) {
      lo = y;
      flo = fy;
      if (side == -1) fhi *= 0.5;
      side = -1;
    } else {
      hi = y;
      fhi = fy;
      if (side == 1) flo *= 0.5;
      side = 1;
    }
    // Bracket at machine resolution: the root is pinned as well as doubles allow.
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(best)))
      return {best, best_r, out.iterations};
  }
  throw ConvergenceError("implicit step: iteration cap reached");
}

BackwardSolution solve_backward(const ProblemSpec& p, const PathBundle& paths, const SolverConfig& cfg,
                                const TerminalMap& terminal) {
  return solve_impl(p, paths, cfg, terminal);
}

BackwardSolution solve_backward_serial(const ProblemSpec& p, const PathBundle& paths, SolverConfig cfg,
                                       const TerminalMap& terminal) {
  cfg.parallel = false;
  return solve_impl(p, paths, cfg, terminal);
}

ContractionReport contraction_experiment(const ProblemSpec& p, const PathBundle& paths, const SolverConfig& cfg,
                                         const TerminalMap& xi_a, const TerminalMap& xi_b, Weights w) {
  if (!xi_a || !xi_b) throw PreconditionError("contraction_experiment: both terminal maps are required");
  const BackwardSolution a = solve_backward(p, paths, cfg, xi_a);
  const BackwardSolution b = solve_backward(p, paths, cfg, xi_b);
  const int n = paths.n_paths, N = paths.grid.n_steps;
  ContractionReport rep;
  std::vector<double> sup_w(static_cast<std::size_t>(n), 0.0), term_w(static_cast<std::size_t>(n));
  std::vector<double> sq(static_cast<std::size_t>(n));
  for (int k = 0; k <= N; ++k) {
    for (int i = 0; i < n; ++i) {
      const double diff = a.y(k, i) - b.y(k, i);
      sq[static_cast<std::size_t>(i)] = diff * diff;
      sup_w[static_cast<std::size_t>(i)] = std::max(sup_w[static_cast<std::size_t>(i)], weight(w, paths, k, i) * diff * diff);
      if (k == N) term_w[static_cast<std::size_t>(i)] = weight(w, paths, k, i) * diff * diff;
    }
    rep.mean_sq_by_step.push_back(pairwise_sum(sq) / n);
  }
  rep.weighted_sup = pairwise_sum(sup_w) / n;
  rep.weighted_terminal = pairwise_sum(term_w) / n;
  rep.ratio = rep.weighted_terminal > 0.0 ? rep.weighted_sup / rep.weighted_terminal
                                          : (rep.weighted_sup > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
  rep.sup_mean_sq = *std::max_element(rep.mean_sq_by_step.begin(), rep.mean_sq_by_step.end());
  rep.terminal_mean_sq = rep.mean_sq_by_step.back();
  return rep;
}

double data_bound(const ProblemSpec& p, const PathBundle& paths, Weights w, const TerminalMap& terminal) {
  const int n = paths.n_paths, N = paths.grid.n_steps;
  const double dt = paths.grid.dt();
  const double g2 = p.constants().gamma * p.constants().gamma;
  std::vector<double> per(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double xi = terminal_value(p, terminal, paths.X(N, i));
    double v = weight(w, paths, N, i) * (xi * xi + convex_value(p.phi(), xi) + convex_value(p.psi(), xi));
    for (int k = 0; k < N; ++k) v += weight(w, paths, k, i) * g2 * (dt + paths.dA(k, i));
    per[static_cast<std::size_t>(i)] = v;
  }
  return pairwise_sum(per) / n;
}

SweepTable penalization_sweep(const ProblemSpec& p, const PathBundle& paths, const std::vector<double>& eps_list,
                              const SolverConfig& cfg, Weights w) {
  if (eps_list.size() < 3) throw PreconditionError("penalization_sweep: need at least three eps values");
  for (std::size_t i = 0; i < eps_list.size(); ++i) {
    if (!(eps_list[i] > 0.0)) throw PreconditionError("penalization_sweep: eps values must be positive");
    if (i > 0 && !(eps_list[i] < eps_list[i - 1]))
      throw PreconditionError("penalization_sweep: eps values must be strictly decreasing");
  }
  SweepTable tab;
  tab.eps_list = eps_list;
  tab.M = data_bound(p, paths, w);
  std::vector<BackwardSolution> sols;
  for (double e : eps_list) {
    SolverConfig c = cfg;
    c.eps = e;
    sols.push_back(solve_backward(p, paths, c));
    tab.estimates.push_back(sols.back().estimate().mean);
  }
  const int n = paths.n_paths, N = paths.grid.n_steps;
  std::vector<double> lx, lr;
  bool defined = true;
  for (std::size_t a = 0; a < sols.size(); ++a)
    for (std::size_t b = a + 1; b < sols.size(); ++b) {
      std::vector<double> sup(static_cast<std::size_t>(n), 0.0);
      for (int k = 0; k <= N; ++k)
        for (int i = 0; i < n; ++i) {
          const double diff = sols[a].y(k, i) - sols[b].y(k, i);
          sup[static_cast<std::size_t>(i)] = std::max(sup[static_cast<std::size_t>(i)], weight(w, paths, k, i) * diff * diff);
        }
      SweepPair pr;
      pr.eps = eps_list[a];
      pr.delta = eps_list[b];
      pr.weighted_sup_sq = pairwise_sum(sup) / n;
      pr.rms = std::sqrt(pr.weighted_sup_sq);
      pr.bound_ratio = tab.M > 0.0 ? pr.weighted_sup_sq / ((pr.eps + pr.delta) * tab.M)
                                   : (pr.weighted_sup_sq > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
      if (!(pr.rms > 1e-10)) defined = false;
      lx.push_back(std::log(pr.eps + pr.delta));
      lr.push_back(std::log(pr.rms));
      tab.pairs.push_back(pr);
    }
  tab.slope_defined = defined;
  if (defined) {
    tab.slope_rms = ols_slope(lx, lr);
    std::vector<double> lsq;
    for (double v : lr) lsq.push_back(2.0 * v);
    tab.slope_sq = ols_slope(lx, lsq);
  } else {
    tab.slope_rms = tab.slope_sq = std::numeric_limits<double>::quiet_NaN();
  }
  return tab;
}

const BoundsEntry* BoundsReport::find(const std::string& name) const {
  for (const auto& e : entries)
    if (e.name == name) return &e;
  return nullptr;
}

BoundsReport apriori_bounds_report(const BackwardSolution& sol, const ProblemSpec& p, const PathBundle& paths,
                                   Weights w) {
  const int n = sol.n_paths, N = sol.grid.n_steps, d = sol.dim;
  const double dt = sol.grid.dt();
  const double eps = sol.eps;
  BoundsReport rep;
  rep.M = data_bound(p, paths, w);

  std::vector<double> e_y(static_cast<std::size_t>(n)), e_yos(static_cast<std::size_t>(n)),
      e_cvx(static_cast<std::size_t>(n));
  std::vector<double> pen_k(static_cast<std::size_t>(N) + 1), cvx_k(static_cast<std::size_t>(N) + 1);
  std::vector<double> tmp_pen(static_cast<std::size_t>(n)), tmp_cvx(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    double sup = 0.0, integ = 0.0, yos = 0.0, cvx = 0.0;
    for (int k = 0; k <= N; ++k) {
      const double wk = weight(w, paths, k, i);
      const double y = sol.y(k, i);
      sup = std::max(sup, wk * y * y);
      if (k < N) {
        double z2 = 0.0;
        for (int c = 0; c < d; ++c) z2 += sol.z(k, i, c) * sol.z(k, i, c);
        const double da = paths.dA(k, i);
        const double jp = p.phi().resolvent(eps, y), jq = p.psi().resolvent(eps, y);
        integ += wk * ((y * y + z2) * dt + y * y * da);
        yos += wk * (sol.u(k, i) * sol.u(k, i) * dt + sol.v(k, i) * sol.v(k, i) * da);
        cvx += wk * (convex_value(p.phi(), jp) * dt + convex_value(p.psi(), jq) * da);
      }
    }
    e_y[static_cast<std::size_t>(i)] = sup + integ;
    e_yos[static_cast<std::size_t>(i)] = yos;
    e_cvx[static_cast<std::size_t>(i)] = cvx;
  }
  for (int k = 0; k <= N; ++k) {
    for (int i = 0; i < n; ++i) {
      const double wk = weight(w, paths, k, i);
      const double y = sol.y(k, i);
      const double jp = p.phi().resolvent(eps, y), jq = p.psi().resolvent(eps, y);
      tmp_pen[static_cast<std::size_t>(i)] = wk * ((y - jp) * (y - jp) + (y - jq) * (y - jq));
      tmp_cvx[static_cast<std::size_t>(i)] = wk * (convex_value(p.phi(), jp) + convex_value(p.psi(), jq));
    }
    pen_k[static_cast<std::size_t>(k)] = pairwise_sum(tmp_pen) / n;
    cvx_k[static_cast<std::size_t>(k)] = pairwise_sum(tmp_cvx) / n;
  }
  auto ratio = [](double lhs, double m) {
    if (m > 0.0) return lhs / m;
    return lhs > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
  };
  const double m = rep.M;
  rep.entries.push_back({"y_energy", pairwise_sum(e_y) / n, 0.0});
  rep.entries.push_back({"yosida_energy", pairwise_sum(e_yos) / n, 0.0});
  rep.entries.push_back({"convex_energy", pairwise_sum(e_cvx) / n, 0.0});
  rep.entries.push_back({"penetration", *std::max_element(pen_k.begin(), pen_k.end()), 0.0});
  rep.entries.push_back({"convex_pointwise", *std::max_element(cvx_k.begin(), cvx_k.end()), 0.0});
  for (auto& e : rep.entries) e.ratio = ratio(e.lhs, e.name == "penetration" ? eps * m : m);
  return rep;
}

}  // namespace pvi
