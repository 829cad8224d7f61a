#include "pvi/validation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "pvi/errors.hpp"
#include "pvi/rng.hpp"

namespace pvi {

namespace {

constexpr double kQuotientTol = 1e-9;
constexpr double kCompatTol = 1e-12;

// Draws quasi-random arguments for one check. Each check owns its own Halton
// sequence so adding a check never perturbs the others.
class Sampler {
 public:
  Sampler(const ProblemSpec& p, int extra_dims, std::uint64_t seed, std::uint64_t salt)
      : p_(p), seq_(std::min(16, std::max(1, extra_dims)), seed ^ (salt * 0x9E3779B97F4A7C15ULL)) {}

  void next() {
    seq_.point(index_++, std::span<double>(u_.data(), static_cast<std::size_t>(seq_.dimension())));
    pos_ = 0;
  }
  double uniform() { return u_[static_cast<std::size_t>(pos_++)]; }
  double in(double lo, double hi) { return lo + uniform() * (hi - lo); }

  Point interior_point() {
    const DomainSpec& dom = p_.domain();
    const Point lo = dom.box_lower(), hi = dom.box_upper();
    Point x(dom.dimension());
    for (int j = 0; j < dom.dimension(); ++j) x[j] = in(lo[j], hi[j]);
    if (dom.level(x) > 0.0) x = dom.project(x).point;
    return x;
  }
  Point boundary_point() {
    const int d = p_.dimension();
    std::array<double, kMaxDim> w{};
    for (int j = 0; j < d; ++j) w[static_cast<std::size_t>(j)] = uniform();
    return p_.domain().boundary_point(std::span<const double>(w.data(), static_cast<std::size_t>(d)));
  }
  Point vec(int d, double lo, double hi) {
    Point z(d);
    for (int j = 0; j < d; ++j) z[j] = in(lo, hi);
    return z;
  }

 private:
  const ProblemSpec& p_;
  Halton seq_;
  std::array<double, 16> u_{};
  std::uint64_t index_ = 0;
  int pos_ = 0;
};

double finite_or_throw(double v, const char* what) {
  if (!std::isfinite(v)) throw EvalError(std::string(what) + " evaluated to a non-finite value during validation");
  return v;
}

CheckEntry bound_check(std::string name, double sup, double bound, std::string detail) {
  CheckEntry e;
  e.name = std::move(name);
  e.value = sup;
  e.margin = sup - bound;
  e.passed = e.margin <= kQuotientTol * (1.0 + std::abs(bound));
  e.detail = std::move(detail);
  return e;
}

std::string fmt(const char* label, double v) {
  std::ostringstream os;
  os << label << v;
  return os.str();
}

}  // namespace

bool ValidationReport::all_passed() const {
  return std::all_of(entries.begin(), entries.end(), [](const CheckEntry& e) { return e.passed; });
}

const CheckEntry* ValidationReport::find(const std::string& name) const {
  for (const auto& e : entries)
    if (e.name == name) return &e;
  return nullptr;
}

ValidationReport validate_assumptions(const ProblemSpec& p, int n_samples, std::uint64_t seed,
                                      const SampleRanges& r) {
  if (n_samples < 1) throw PreconditionError("validate_assumptions: n_samples must be >= 1");
  const int d = p.dimension();
  const double T = p.horizon();
  const auto& k = p.constants();
  ValidationReport rep;

  {
    Sampler s(p, 1 + 2 * d, seed, 1);
    double sup = 0.0;
    for (int i = 0; i < n_samples; ++i) {
      s.next();
      const double t = s.in(0.0, T);
      const Point x = s.interior_point(), xp = s.interior_point();
      const double dx = (x - xp).norm();
      if (dx == 0.0) continue;
      const double db = (p.b(t, x) - p.b(t, xp)).norm();
      const double ds = (p.sigma(t, x) - p.sigma(t, xp)).norm();
      sup = std::max(sup, finite_or_throw((db + ds) / dx, "b or sigma"));
    }
    rep.entries.push_back(bound_check("lipschitz_b_sigma", sup, k.L, fmt("L = ", k.L)));
  }
  {
    Sampler s(p, 3 + 2 * d, seed, 2);
    double sup_mono = -std::numeric_limits<double>::infinity();
    double sup_lip = 0.0;
    double sup_growth = 0.0;
    for (int i = 0; i < n_samples; ++i) {
      s.next();
      const double t = s.in(0.0, T);
      const Point x = s.interior_point();
      const double y = s.in(r.y_lo, r.y_hi), yp = s.in(r.y_lo, r.y_hi);
      const Point z = s.vec(d, r.z_lo, r.z_hi);
      const Point zp = s.vec(d, r.z_lo, r.z_hi);
      const double fy = finite_or_throw(p.f(t, x, y, z), "f");
      if (y != yp) {
        const double fyp = finite_or_throw(p.f(t, x, yp, z), "f");
        sup_mono = std::max(sup_mono, (y - yp) * (fy - fyp) / ((y - yp) * (y - yp)));
      }
      const double dz = (z - zp).norm();
      if (dz > 0.0) sup_lip = std::max(sup_lip, std::abs(fy - finite_or_throw(p.f(t, x, y, zp), "f")) / dz);
      const double f0 = finite_or_throw(p.f(t, x, y, Point::Zero(d)), "f");
      sup_growth = std::max(sup_growth, std::abs(f0) / (1.0 + std::abs(y)));
    }
    rep.entries.push_back(bound_check("f_monotone_y", sup_mono, k.alpha, fmt("alpha = ", k.alpha)));
    rep.entries.push_back(bound_check("f_lipschitz_z", sup_lip, k.L, fmt("L = ", k.L)));
    rep.entries.push_back(bound_check("f_growth", sup_growth, k.gamma, fmt("gamma = ", k.gamma)));
  }
  {
    Sampler s(p, 3 + d, seed, 3);
    double sup_mono = -std::numeric_limits<double>::infinity();
    double sup_growth = 0.0;
    for (int i = 0; i < n_samples; ++i) {
      s.next();
      const double t = s.in(0.0, T);
      const Point u = s.boundary_point();
      const double y = s.in(r.y_lo, r.y_hi), yp = s.in(r.y_lo, r.y_hi);
      const double gy = finite_or_throw(p.g(t, u, y), "g");
      if (y != yp) {
        const double gyp = finite_or_throw(p.g(t, u, yp), "g");
        sup_mono = std::max(sup_mono, (y - yp) * (gy - gyp) / ((y - yp) * (y - yp)));
      }
      sup_growth = std::max(sup_growth, std::abs(gy) / (1.0 + std::abs(y)));
    }
    rep.entries.push_back(bound_check("g_monotone_y", sup_mono, k.beta, fmt("beta = ", k.beta)));
    rep.entries.push_back(bound_check("g_growth", sup_growth, k.gamma, fmt("gamma = ", k.gamma)));
  }
  {
    CheckEntry e;
    e.name = "initial_bound";
    e.value = p.initial_bound();
    e.passed = std::isfinite(e.value);
    e.margin = e.passed ? 0.0 : std::numeric_limits<double>::infinity();
    e.detail = "M = sup |phi(h)|, |psi(h)| over construction samples";
    rep.entries.push_back(e);
  }
  {
    Sampler s(p, d, seed, 4);
    double worst = 0.0;
    for (int i = 0; i < n_samples; ++i) {
      s.next();
      const Point u = s.boundary_point();
      worst = std::max(worst, std::abs(p.domain().gradient(u).norm() - 1.0));
    }
    CheckEntry e;
    e.name = "boundary_unit_normal";
    e.value = worst;
    e.margin = worst - 1e-8;
    e.passed = worst <= 1e-8;
    e.detail = "max ||grad level| - 1| on boundary samples";
    rep.entries.push_back(e);
  }
  return rep;
}

CompatReport check_compatibility(const ProblemSpec& p, const std::vector<double>& eps_list, int n_samples,
                                 std::uint64_t seed, const SampleRanges& r) {
  if (n_samples < 1) throw PreconditionError("check_compatibility: n_samples must be >= 1");
  for (double e : eps_list)
    if (!(e > 0.0)) throw PreconditionError("check_compatibility: every eps must be positive");
  const int d = p.dimension();
  const double T = p.horizon();

  auto make = [](const char* name) {
    CheckEntry e;
    e.name = name;
    e.margin = -std::numeric_limits<double>::infinity();
    return e;
  };
  auto finish = [](CheckEntry& e) {
    e.value = e.margin;
    e.passed = e.margin <= kCompatTol;
  };
  CompatReport out;
  out.yosida_product = make("yosida_product_nonnegative");
  out.boundary_g = make("boundary_g_compatible");
  out.interior_f = make("interior_f_compatible");

  for (std::size_t ie = 0; ie < eps_list.size(); ++ie) {
    const double eps = eps_list[ie];
    CompatEntry ce{eps, make("yosida_product_nonnegative"), make("boundary_g_compatible"),
                   make("interior_f_compatible")};
    Sampler s(p, 2 + 2 * d, seed, 100 + ie);
    for (int i = 0; i < n_samples; ++i) {
      s.next();
      const double t = s.in(0.0, T);
      const double y = s.in(r.y_lo, r.y_hi);
      const Point x = s.interior_point();
      const Point z = s.vec(d, r.z_lo, r.z_hi);
      const double U = p.phi().yosida(eps, y);
      const double V = p.psi().yosida(eps, y);
      ce.yosida_product.margin = std::max(ce.yosida_product.margin, -U * V);
      const double f = finite_or_throw(p.f(t, x, y, z), "f");
      ce.interior_f.margin = std::max(ce.interior_f.margin, V * f - std::max(0.0, U * f));
    }
    Sampler sb(p, 2 + d, seed, 200 + ie);
    for (int i = 0; i < n_samples; ++i) {
      sb.next();
      const double t = sb.in(0.0, T);
      const double y = sb.in(r.y_lo, r.y_hi);
      const Point u = sb.boundary_point();
      const double U = p.phi().yosida(eps, y);
      const double V = p.psi().yosida(eps, y);
      const double g = finite_or_throw(p.g(t, u, y), "g");
      ce.boundary_g.margin = std::max(ce.boundary_g.margin, U * g - std::max(0.0, V * g));
    }
    finish(ce.yosida_product);
    finish(ce.boundary_g);
    finish(ce.interior_f);
    out.yosida_product.margin = std::max(out.yosida_product.margin, ce.yosida_product.margin);
    out.boundary_g.margin = std::max(out.boundary_g.margin, ce.boundary_g.margin);
    out.interior_f.margin = std::max(out.interior_f.margin, ce.interior_f.margin);
    out.per_eps.push_back(std::move(ce));
  }
  finish(out.yosida_product);
  finish(out.boundary_g);
  finish(out.interior_f);
  return out;
}

ValidationReport uniqueness_hypotheses_check(const ProblemSpec& p, int n_samples, std::uint64_t seed,
                                             const SampleRanges& r) {
  if (n_samples < 1) throw PreconditionError("uniqueness_hypotheses_check: n_samples must be >= 1");
  const int d = p.dimension();
  const double T = p.horizon();
  ValidationReport rep;
  {
    Sampler s(p, 3 + d, seed, 11);
    double worst = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < n_samples; ++i) {
      s.next();
      const double t = s.in(0.0, T);
      const Point u = s.boundary_point();
      double y = s.in(r.y_lo, r.y_hi), yp = s.in(r.y_lo, r.y_hi);
      if (y == yp) continue;
      if (y > yp) std::swap(y, yp);
      worst = std::max(worst, finite_or_throw(p.g(t, u, yp), "g") - finite_or_throw(p.g(t, u, y), "g"));
    }
    CheckEntry e;
    e.name = "g_decreasing_in_y";
    e.value = worst;
    e.margin = worst;
    e.passed = worst <= kCompatTol;
    e.detail = "max g(t,u,r') - g(t,u,r) over sampled r < r'";
    rep.entries.push_back(e);
  }
  {
    Sampler s(p, 2 + 3 * d, seed, 12);
    double sup = 0.0;
    for (int i = 0; i < n_samples; ++i) {
      s.next();
      const double t = s.in(0.0, T);
      const double y = s.in(r.y_lo, r.y_hi);
      const Point x = s.interior_point(), xp = s.interior_point();
      const Point z = s.vec(d, r.z_lo, r.z_hi);
      const double scale = (x - xp).norm() * (1.0 + z.norm());
      if (scale == 0.0) continue;
      const double diff = finite_or_throw(p.f(t, x, y, z), "f") - finite_or_throw(p.f(t, xp, y, z), "f");
      sup = std::max(sup, std::abs(diff) / scale);
    }
    CheckEntry e;
    e.name = "f_x_modulus";
    e.value = sup;
    e.margin = std::isfinite(sup) ? 0.0 : std::numeric_limits<double>::infinity();
    e.passed = std::isfinite(sup);
    e.detail = "sup |f(t,x,r,p) - f(t,x',r,p)| / (|x - x'| (1 + |p|))";
    rep.entries.push_back(e);
  }
  return rep;
}

}  // namespace pvi
