#include "pvi/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "pvi/errors.hpp"

namespace pvi {

namespace {

using std::numbers::pi;

// Thomas algorithm; a = sub, b = diag, c = super. Overwrites d with the solution.
void solve_tridiagonal(std::vector<double> a, std::vector<double> b, std::vector<double> c, std::vector<double>& d) {
  const std::size_t n = b.size();
  for (std::size_t i = 1; i < n; ++i) {
    const double m = a[i] / b[i - 1];
    b[i] -= m * c[i - 1];
    d[i] -= m * d[i - 1];
  }
  d[n - 1] /= b[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) d[i] = (d[i] - c[i] * d[i + 1]) / b[i];
}

Point pt(double v) {
  Point p(1);
  p[0] = v;
  return p;
}

bool diffusion_is_zero(const ProblemSpec& p) {
  for (const auto& e : p.coefficients().diffusion)
    if (!e.is_constant() || e.constant_value() != 0.0) return false;
  return true;
}

double project_onto(const ConvexFunction& f, double y) {
  const auto [lo, hi] = f.domain();
  if (lo.is_finite()) y = std::max(y, lo.value());
  if (hi.is_finite()) y = std::min(y, hi.value());
  return y;
}

// Index i with axis[i] <= v <= axis[i+1] and the weight of axis[i+1].
std::pair<std::size_t, double> locate(const std::vector<double>& axis, double v) {
  if (axis.size() == 1) return {0, 0.0};
  auto it = std::upper_bound(axis.begin(), axis.end(), v);
  std::size_t i = it == axis.begin() ? 0 : static_cast<std::size_t>(it - axis.begin()) - 1;
  i = std::min(i, axis.size() - 2);
  const double w = (v - axis[i]) / (axis[i + 1] - axis[i]);
  return {i, std::clamp(w, 0.0, 1.0)};
}

double interpolate(const GridFunction& g, double t, double x) {
  const auto [it, wt] = locate(g.t, t);
  const auto [ix, wx] = locate(g.x, x);
  const std::size_t nx = g.x.size();
  auto v = [&](std::size_t a, std::size_t b) { return g.values[a * nx + b]; };
  const std::size_t it1 = g.t.size() == 1 ? it : it + 1;
  const std::size_t ix1 = nx == 1 ? ix : ix + 1;
  return (1 - wt) * ((1 - wx) * v(it, ix) + wx * v(it, ix1)) + wt * ((1 - wx) * v(it1, ix) + wx * v(it1, ix1));
}

// Union of the two axes restricted to their common range.
std::vector<double> merged_axis(const std::vector<double>& a, const std::vector<double>& b, const char* name) {
  const double lo = std::max(a.front(), b.front());
  const double hi = std::min(a.back(), b.back());
  constexpr double tol = 1e-12;
  if (lo > hi + tol) throw ShapeError(std::string("compare: supports are disjoint in ") + name);
  std::vector<double> out;
  for (const auto* axis : {&a, &b})
    for (double v : *axis)
      if (v >= lo - tol && v <= hi + tol) out.push_back(std::clamp(v, std::min(lo, hi), std::max(lo, hi)));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end(), [](double u, double v) { return std::abs(u - v) <= tol; }), out.end());
  return out;
}

std::vector<double> restricted_axis(const std::vector<double>& a, const std::vector<double>& b, const char* name) {
  constexpr double tol = 1e-12;
  std::vector<double> out;
  for (double v : a)
    if (v >= b.front() - tol && v <= b.back() + tol) out.push_back(v);
  if (out.empty()) throw ShapeError(std::string("compare: supports are disjoint in ") + name);
  return out;
}

void check_sorted(const GridFunction& g) {
  if (g.t.empty() || g.x.empty() || g.values.size() != g.t.size() * g.x.size())
    throw ShapeError("compare: grid function has inconsistent shape");
  if (!std::is_sorted(g.t.begin(), g.t.end()) || !std::is_sorted(g.x.begin(), g.x.end()))
    throw ShapeError("compare: axes must be sorted");
}

}  // namespace

SeriesValue neumann_heat_series(double x, double t, const std::vector<double>& c, int n_terms) {
  if (!(t >= 0.0)) throw PreconditionError("neumann_heat_series: t must be >= 0");
  if (n_terms < 0) throw PreconditionError("neumann_heat_series: n_terms must be >= 0");
  SeriesValue out;
  for (std::size_t k = 0; k < c.size(); ++k) {
    const double kk = static_cast<double>(k);
    const double decay = std::exp(-kk * kk * pi * pi * t / 2.0);
    if (static_cast<int>(k) < n_terms) out.value += c[k] * decay * std::cos(kk * pi * x);
    else out.tail_bound += std::abs(c[k]) * decay;
  }
  return out;
}

std::vector<double> cosine_coefficients(const std::function<double(double)>& h, int n_modes, int n_intervals) {
  if (n_modes < 1 || n_intervals < 2 || n_intervals % 2) throw PreconditionError("cosine_coefficients: bad sizes");
  const double dx = 1.0 / n_intervals;
  std::vector<double> hv(static_cast<std::size_t>(n_intervals) + 1);
  for (int j = 0; j <= n_intervals; ++j) hv[static_cast<std::size_t>(j)] = h(j * dx);
  std::vector<double> c(static_cast<std::size_t>(n_modes));
  for (int k = 0; k < n_modes; ++k) {
    double s = 0.0;
    for (int j = 0; j <= n_intervals; ++j) {
      const double w = (j == 0 || j == n_intervals) ? 1.0 : (j % 2 ? 4.0 : 2.0);
      s += w * hv[static_cast<std::size_t>(j)] * std::cos(k * pi * j * dx);
    }
    c[static_cast<std::size_t>(k)] = (k == 0 ? 1.0 : 2.0) * s * dx / 3.0;
  }
  return c;
}

FdGrid solve_penalized_fd(const ProblemSpec& spec, double eps, int nx, int nt, double theta) {
  if (!(theta >= 0.5 && theta <= 1.0)) throw StabilityError("theta must lie in [1/2, 1]");
  if (spec.dimension() != 1 || !spec.domain().is_interval())
    throw PreconditionError("finite-difference oracle requires d = 1 on an interval");
  if (nx < 2 || nt < 1) throw PreconditionError("finite-difference oracle needs nx >= 2, nt >= 1");
  if (!(eps > 0.0)) throw PreconditionError("eps must be positive");
  const ProblemSpec p = spec.reversed() ? spec.time_reversed() : spec;
  const auto& iv = std::get<IntervalDomain>(p.domain().variant());
  const double h = (iv.right - iv.left) / nx;
  const double dt = p.horizon() / nt;
  const std::size_t n = static_cast<std::size_t>(nx) + 1;

  FdGrid out;
  out.theta = theta;
  for (int j = 0; j <= nx; ++j) out.x.push_back(j == nx ? iv.right : iv.left + j * h);
  for (int m = 0; m <= nt; ++m) out.t.push_back(m == nt ? p.horizon() : m * dt);
  out.values.resize((static_cast<std::size_t>(nt) + 1) * n);

  std::vector<double> u(n);
  for (std::size_t j = 0; j < n; ++j) u[j] = p.h(pt(out.x[j]));
  std::copy(u.begin(), u.end(), out.values.begin());

  std::vector<double> sub(n), diag(n), sup(n), kappa(n, 0.0);
  // Row coefficients of L at time t: (L u)_j = sub_j u_{j-1} + diag_j u_j + sup_j u_{j+1};
  // the end rows fold the ghost nodes in and leave -kappa * (grad psi_eps - g).
  auto assemble = [&](double t) {
    for (std::size_t j = 0; j < n; ++j) {
      const Point xj = pt(out.x[j]);
      const double s = p.sigma(t, xj)(0, 0);
      const double b = p.b(t, xj)[0];
      const double s2 = s * s;
      out.cfl = std::max(out.cfl, s2 * dt / (h * h));
      if (j == 0) {
        sub[j] = 0.0;
        diag[j] = -s2 / (h * h);
        sup[j] = s2 / (h * h);
        kappa[j] = s2 / h - b;
      } else if (j == n - 1) {
        sub[j] = s2 / (h * h);
        diag[j] = -s2 / (h * h);
        sup[j] = 0.0;
        kappa[j] = s2 / h + b;
      } else {
        sub[j] = 0.5 * s2 / (h * h) - b / (2 * h);
        diag[j] = -s2 / (h * h);
        sup[j] = 0.5 * s2 / (h * h) + b / (2 * h);
      }
      if (kappa[j] < 0.0 && (j == 0 || j == n - 1))
        throw StabilityError("boundary drift dominates diffusion; refine nx");
    }
  };

  std::vector<double> rhs(n), a(n), bdiag(n), c(n);
  for (int m = 0; m < nt; ++m) {
    const double t0 = out.t[static_cast<std::size_t>(m)], t1 = out.t[static_cast<std::size_t>(m) + 1];
    assemble(t0);
    const std::vector<double> kappa0 = kappa;
    // Explicit part and sources at level m.
    for (std::size_t j = 0; j < n; ++j) {
      const Point xj = pt(out.x[j]);
      double lu = diag[j] * u[j];
      if (j > 0) lu += sub[j] * u[j - 1];
      if (j + 1 < n) lu += sup[j] * u[j + 1];
      double ux;
      if (j == 0) ux = p.psi().yosida(eps, u[0]) - p.g(t0, xj, u[0]);
      else if (j == n - 1) ux = p.g(t0, xj, u[j]) - p.psi().yosida(eps, u[j]);
      else ux = (u[j + 1] - u[j - 1]) / (2 * h);
      Point z(1);
      z[0] = p.sigma(t0, xj)(0, 0) * ux;
      double src = p.f(t0, xj, u[j], z);
      if (j == 0 || j == n - 1) src += kappa0[j] * p.g(t0, xj, u[j]);
      rhs[j] = u[j] + (1.0 - theta) * dt * lu + dt * src;
    }
    assemble(t1);
    for (std::size_t j = 0; j < n; ++j) {
      a[j] = -theta * dt * sub[j];
      bdiag[j] = 1.0 - theta * dt * diag[j];
      c[j] = -theta * dt * sup[j];
    }
    solve_tridiagonal(a, bdiag, c, rhs);
    rhs[0] = p.psi().backward_prox_step(eps, kappa[0] * dt, rhs[0]);
    rhs[n - 1] = p.psi().backward_prox_step(eps, kappa[n - 1] * dt, rhs[n - 1]);
    for (std::size_t j = 0; j < n; ++j) u[j] = p.phi().backward_prox_step(eps, dt, rhs[j]);
    std::copy(u.begin(), u.end(), out.values.begin() + static_cast<std::ptrdiff_t>((static_cast<std::size_t>(m) + 1) * n));
  }
  return out;
}

Trajectory solve_deterministic_vi(const ProblemSpec& p, const Point& x0, double s0, int nt, const ViMode& mode) {
  if (!diffusion_is_zero(p)) throw PreconditionError("deterministic VI requires sigma = 0");
  if (nt < 1) throw PreconditionError("deterministic VI needs nt >= 1");
  if (!(s0 >= 0.0 && s0 < p.horizon())) throw PreconditionError("deterministic VI: start time must lie in [0, T)");
  if (!(p.domain().level(x0) <= 1e-10)) throw DomainError("deterministic VI: start point outside the closed domain");
  const bool exact = mode.exact;
  if (exact) {
    for (const ConvexFunction* f : {&p.phi(), &p.psi()})
      if (!f->is_zero() && !f->is_indicator()) throw PreconditionError("exact mode needs indicator phi and psi");
  } else if (!(mode.eps > 0.0)) {
    throw PreconditionError("deterministic VI: eps must be positive");
  }
  const int d = p.dimension();
  const double T = p.horizon();
  const double dt = (T - s0) / nt;

  Trajectory tr;
  tr.dim = d;
  tr.s.resize(static_cast<std::size_t>(nt) + 1);
  tr.x.resize(tr.s.size() * static_cast<std::size_t>(d));
  tr.A.assign(tr.s.size(), 0.0);
  tr.Y.assign(tr.s.size(), 0.0);
  tr.U.assign(tr.s.size(), 0.0);

  // Forward path: Euler step on the drift, then projection.
  Point x = x0;
  for (int k = 0; k <= nt; ++k) {
    tr.s[static_cast<std::size_t>(k)] = k == nt ? T : s0 + k * dt;
    for (int c = 0; c < d; ++c) tr.x[static_cast<std::size_t>(k) * d + c] = x[c];
    if (k == nt) break;
    Point y = x + p.b(tr.s[static_cast<std::size_t>(k)], x) * dt;
    double da = 0.0;
    if (p.domain().level(y) > 0.0) {
      const Projection pr = p.domain().project(y);
      y = pr.point;
      da = pr.distance;
    }
    tr.A[static_cast<std::size_t>(k) + 1] = tr.A[static_cast<std::size_t>(k)] + da;
    x = y;
  }
  auto state = [&](int k) {
    Point s(d);
    for (int c = 0; c < d; ++c) s[c] = tr.x[static_cast<std::size_t>(k) * d + c];
    return s;
  };

  const Point zero = Point::Zero(d);
  const double eps = mode.eps;
  double y = p.h(state(nt));
  tr.Y[static_cast<std::size_t>(nt)] = y;
  tr.U[static_cast<std::size_t>(nt)] = exact ? 0.0 : p.phi().yosida(eps, y);
  for (int k = nt - 1; k >= 0; --k) {
    const double sa = tr.s[static_cast<std::size_t>(k)], sb = tr.s[static_cast<std::size_t>(k) + 1];
    const double sm = 0.5 * (sa + sb);
    const Point xa = state(k), xb = state(k + 1);
    const Point xm = 0.5 * (xa + xb);
    const double da = tr.A[static_cast<std::size_t>(k) + 1] - tr.A[static_cast<std::size_t>(k)];
    auto half_prox = [&](double v) {
      v = p.phi().backward_prox_step(eps, 0.5 * dt, v);
      if (da > 0.0) v = p.psi().backward_prox_step(eps, 0.5 * da, v);
      return v;
    };
    if (!exact) y = half_prox(y);
    const double k1 = p.f(sb, xb, y, zero);
    const double k2 = p.f(sm, xm, y + 0.5 * dt * k1, zero);
    const double k3 = p.f(sm, xm, y + 0.5 * dt * k2, zero);
    const double k4 = p.f(sa, xa, y + dt * k3, zero);
    y += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (da > 0.0) y += da * p.g(sa, xa, y);
    if (exact) {
      double proj = project_onto(p.phi(), y);
      if (da > 0.0) proj = project_onto(p.psi(), proj);
      tr.U[static_cast<std::size_t>(k)] = (y - proj) / dt;
      y = proj;
    } else {
      y = half_prox(y);
      tr.U[static_cast<std::size_t>(k)] = p.phi().yosida(eps, y);
    }
    tr.Y[static_cast<std::size_t>(k)] = y;
  }
  return tr;
}

GridFunction to_grid_function(const SolutionGrid& sol) {
  for (const Point& x : sol.points)
    if (x.size() != 1) throw ShapeError("compare: grid function needs d = 1");
  std::vector<std::size_t> ti(sol.times.size()), pj(sol.points.size());
  std::iota(ti.begin(), ti.end(), 0);
  std::iota(pj.begin(), pj.end(), 0);
  std::sort(ti.begin(), ti.end(), [&](auto a, auto b) { return sol.times[a] < sol.times[b]; });
  std::sort(pj.begin(), pj.end(), [&](auto a, auto b) { return sol.points[a][0] < sol.points[b][0]; });
  GridFunction g;
  for (auto i : ti) g.t.push_back(sol.times[i]);
  for (auto j : pj) g.x.push_back(sol.points[j][0]);
  for (auto i : ti)
    for (auto j : pj) g.values.push_back(sol.value(i, j));
  return g;
}

GridFunction to_grid_function(const FdGrid& fd) { return GridFunction{fd.t, fd.x, fd.values}; }

CompareResult compare(const GridFunction& a, const GridFunction& b) {
  check_sorted(a);
  check_sorted(b);
  const std::vector<double> ts = merged_axis(a.t, b.t, "t");
  const std::vector<double> xs = merged_axis(a.x, b.x, "x");
  CompareResult out;
  double ss = 0.0;
  for (double t : ts)
    for (double x : xs) {
      const double va = interpolate(a, t, x), vb = interpolate(b, t, x);
      const double diff = va - vb;
      out.table.push_back({t, x, va, vb, diff});
      out.sup = std::max(out.sup, std::abs(diff));
      ss += diff * diff;
    }
  out.l2 = std::sqrt(ss / static_cast<double>(out.table.size()));
  return out;
}

CompareResult compare_at_nodes(const GridFunction& a, const GridFunction& b) {
  check_sorted(a);
  check_sorted(b);
  const std::vector<double> ts = restricted_axis(a.t, b.t, "t");
  const std::vector<double> xs = restricted_axis(a.x, b.x, "x");
  CompareResult out;
  double ss = 0.0;
  for (double t : ts)
    for (double x : xs) {
      const double va = interpolate(a, t, x), vb = interpolate(b, t, x);
      out.table.push_back({t, x, va, vb, va - vb});
      out.sup = std::max(out.sup, std::abs(va - vb));
      ss += (va - vb) * (va - vb);
    }
  out.l2 = std::sqrt(ss / static_cast<double>(out.table.size()));
  return out;
}

}  // namespace pvi
