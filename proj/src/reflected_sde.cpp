#include "pvi/reflected_sde.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pvi/errors.hpp"
#include "pvi/parallel.hpp"
#include "pvi/rng.hpp"

namespace pvi {

namespace {

constexpr double kBoundaryTol = 1e-10;

// One Euler-projection path integrator. Constant coefficients are hoisted out
// of the step loop; otherwise b and sigma are evaluated at every substep.
class Stepper {
 public:
  Stepper(const ProblemSpec& p, const TimeGrid& grid, std::uint64_t seed, const SimulationOptions& opts)
      : p_(p),
        dom_(p.domain()),
        d_(p.dimension()),
        grid_(grid),
        seed_(seed),
        stream_(opts.stream),
        substeps_(opts.substeps),
        dtf_(grid.dt() / opts.substeps),
        sqdtf_(std::sqrt(grid.dt() / opts.substeps)) {
    const auto& c = p.coefficients();
    const_b_ = std::all_of(c.drift.begin(), c.drift.end(), [](const Expression& e) { return e.is_constant(); });
    const_s_ = std::all_of(c.diffusion.begin(), c.diffusion.end(),
                           [](const Expression& e) { return e.is_constant(); });
    const Point origin = Point::Zero(d_);
    if (const_b_) b0_ = p.b(grid.t0, origin);
    if (const_s_) s0_ = p.sigma(grid.t0, origin);
  }

  int dim() const { return d_; }

  // Advances path i over coarse step k. Returns the local-time increment and
  // writes the summed Brownian increment.
  double advance(int k, int i, Point& x, Point& dw_sum) const {
    dw_sum.setZero();
    double da = 0.0;
    std::array<double, kMaxDim> z{};
    Point dw(d_);
    for (int j = 0; j < substeps_; ++j) {
      const auto m = static_cast<std::uint32_t>(k * substeps_ + j);
      fill_normals(RngAddress{seed_, stream_, static_cast<std::uint32_t>(i), m},
                   std::span<double>(z.data(), static_cast<std::size_t>(d_)));
      for (int c = 0; c < d_; ++c) dw[c] = sqdtf_ * z[static_cast<std::size_t>(c)];
      dw_sum += dw;
      const double s = grid_.t0 + static_cast<double>(m) * dtf_;
      Point pred = x;
      if (const_b_) pred += b0_ * dtf_; else pred += p_.b(s, x) * dtf_;
      if (const_s_) pred += s0_ * dw; else pred += p_.sigma(s, x) * dw;
      if (dom_.level(pred) > 0.0) {
        const Projection pr = project(dom_, pred);
        if (std::abs(dom_.level(pr.point)) > kBoundaryTol) {
          std::ostringstream os;
          os << "projection landed off the boundary (level " << dom_.level(pr.point) << ")";
          throw GeometryError(os.str());
        }
        x = pr.point;
        da += pr.distance;
      } else {
        x = pred;
      }
    }
    return da;
  }

 private:
  const ProblemSpec& p_;
  const DomainSpec& dom_;
  int d_;
  TimeGrid grid_;
  std::uint64_t seed_;
  std::uint32_t stream_;
  int substeps_;
  double dtf_;
  double sqdtf_;
  bool const_b_ = false;
  bool const_s_ = false;
  Point b0_;
  SquareMatrix s0_;
};

PathBundle allocate(const ProblemSpec& p, const Point& x0, const TimeGrid& grid, int n_paths,
                    std::uint64_t seed, const SimulationOptions& opts) {
  if (n_paths < 1) throw PreconditionError("simulate: n_paths must be >= 1");
  if (opts.substeps < 1) throw PreconditionError("simulate: substeps must be >= 1");
  if (x0.size() != p.dimension()) throw PreconditionError("simulate: start point has the wrong dimension");
  if (!(p.domain().level(x0) <= kBoundaryTol)) {
    std::ostringstream os;
    os << "start point (";
    for (Eigen::Index j = 0; j < x0.size(); ++j) os << (j ? ", " : "") << x0[j];
    os << ") lies outside the closed domain";
    throw DomainError(os.str());
  }
  PathBundle b;
  b.grid = grid;
  b.n_paths = n_paths;
  b.dim = p.dimension();
  b.substeps = opts.substeps;
  b.seed = seed;
  b.stream = opts.stream;
  const auto np = static_cast<std::size_t>(n_paths);
  const auto d = static_cast<std::size_t>(b.dim);
  const auto nk = static_cast<std::size_t>(grid.n_steps);
  b.states.assign((nk + 1) * np * d, 0.0);
  b.local_time.assign((nk + 1) * np, 0.0);
  b.increments.assign(nk * np * d, 0.0);
  return b;
}

void run_path(const Stepper& st, PathBundle& b, const Point& x0, int i) {
  const int d = b.dim;
  Point x = x0;
  Point dw(d);
  double a = 0.0;
  for (int c = 0; c < d; ++c) b.states[b.slot(0, i) * d + c] = x[c];
  for (int k = 0; k < b.grid.n_steps; ++k) {
    a += st.advance(k, i, x, dw);
    const std::size_t s1 = b.slot(k + 1, i);
    for (int c = 0; c < d; ++c) {
      b.states[s1 * d + c] = x[c];
      b.increments[b.slot(k, i) * d + c] = dw[c];
    }
    b.local_time[s1] = a;
  }
}

}  // namespace

TimeGrid::TimeGrid(double t0_, double T_, int n) : t0(t0_), T(T_), n_steps(n) {
  if (!(n >= 1)) throw PreconditionError("time grid needs at least one step");
  if (!(std::isfinite(t0_) && std::isfinite(T_) && T_ > t0_))
    throw PreconditionError("time grid needs t0 < T");
}

Point PathBundle::X(int k, int i) const {
  Point x(dim);
  const std::size_t s = slot(k, i) * static_cast<std::size_t>(dim);
  for (int c = 0; c < dim; ++c) x[c] = states[s + static_cast<std::size_t>(c)];
  return x;
}

Point PathBundle::dW(int k, int i) const {
  Point w(dim);
  const std::size_t s = slot(k, i) * static_cast<std::size_t>(dim);
  for (int c = 0; c < dim; ++c) w[c] = increments[s + static_cast<std::size_t>(c)];
  return w;
}

Projection project(const DomainSpec& domain, const Point& y) { return domain.project(y); }

PathBundle simulate(const ProblemSpec& p, const Point& x0, const TimeGrid& grid, int n_paths,
                    std::uint64_t seed, const SimulationOptions& opts) {
  PathBundle b = allocate(p, x0, grid, n_paths, seed, opts);
  const Stepper st(p, grid, seed, opts);
  parallel_for(n_paths, [&](int i) { run_path(st, b, x0, i); });
  return b;
}

PathBundle simulate_serial(const ProblemSpec& p, const Point& x0, const TimeGrid& grid, int n_paths,
                           std::uint64_t seed, const SimulationOptions& opts) {
  PathBundle b = allocate(p, x0, grid, n_paths, seed, opts);
  const Stepper st(p, grid, seed, opts);
  for (int i = 0; i < n_paths; ++i) run_path(st, b, x0, i);
  return b;
}

MeanSe estimate_exp_local_time(const PathBundle& paths, double mu) {
  if (!(mu >= 0.0)) throw PreconditionError("estimate_exp_local_time: mu must be >= 0");
  std::vector<double> v(static_cast<std::size_t>(paths.n_paths));
  for (int i = 0; i < paths.n_paths; ++i) v[static_cast<std::size_t>(i)] = std::exp(mu * paths.A(paths.grid.n_steps, i));
  return mean_se(v);
}

double continuity_modulus_experiment(const ProblemSpec& p, double t, const Point& x, double tp,
                                     const Point& xp, double p_exp, int n_paths, int n_steps,
                                     std::uint64_t seed, const SimulationOptions& opts) {
  if (!(p_exp >= 0.0)) throw PreconditionError("continuity_modulus_experiment: p_exp must be >= 0");
  const double T = p.horizon();
  const double t_lo = std::min(t, tp);
  if (!(t_lo >= 0.0 && std::max(t, tp) < T)) throw PreconditionError("start times must lie in [0, T)");
  const TimeGrid grid(t_lo, T, n_steps);
  auto start_index = [&](double s) {
    const double r = (s - t_lo) / grid.dt();
    const double k = std::round(r);
    if (std::abs(r - k) > 1e-9) throw PreconditionError("later start time must be a grid node");
    return static_cast<int>(k);
  };
  const int k1 = start_index(t), k2 = start_index(tp);
  for (const Point* q : {&x, &xp})
    if (!(p.domain().level(*q) <= kBoundaryTol)) throw DomainError("start point lies outside the closed domain");

  const Stepper st(p, grid, seed, opts);
  std::vector<double> sups(static_cast<std::size_t>(n_paths));
  parallel_for(n_paths, [&](int i) {
    Point a = x, b = xp, dw(p.dimension());
    double sup = std::pow((a - b).norm(), p_exp);
    for (int k = 0; k < n_steps; ++k) {
      // Both paths consume the same draws at step k; a path before its start
      // time stays put.
      Point a_next = a, b_next = b;
      if (k >= k1) st.advance(k, i, a_next, dw);
      if (k >= k2) st.advance(k, i, b_next, dw);
      a = a_next;
      b = b_next;
      sup = std::max(sup, std::pow((a - b).norm(), p_exp));
    }
    sups[static_cast<std::size_t>(i)] = sup;
  });
  return pairwise_sum(sups) / n_paths;
}

}  // namespace pvi
