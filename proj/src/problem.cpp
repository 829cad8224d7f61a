#include "pvi/problem.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "pvi/errors.hpp"
#include "pvi/rng.hpp"

namespace pvi {

namespace {

std::span<const double> as_span(const Point& x) {
  return {x.data(), static_cast<std::size_t>(x.size())};
}

void require_vars(const Expression& e, const std::string& what, int d, bool allow_t, bool allow_x,
                  bool allow_y, bool allow_z) {
  auto fail = [&](const std::string& why) {
    throw ConfigError(what + " = \"" + e.source() + "\": " + why);
  };
  if (!allow_t && e.depends_on_t()) fail("may not depend on t");
  if (!allow_y && e.depends_on_y()) fail("may not depend on y");
  if (!allow_x && e.depends_on_x()) fail("may not depend on x");
  if (!allow_z && e.depends_on_z()) fail("may not depend on z");
  if (e.max_x_index() > d) fail("references x" + std::to_string(e.max_x_index()) + " but d = " + std::to_string(d));
  if (e.max_z_index() > d) fail("references z" + std::to_string(e.max_z_index()) + " but d = " + std::to_string(d));
}

// Deterministic interior samples by rejection from the bounding box.
std::vector<Point> interior_samples(const DomainSpec& dom, int count) {
  const int d = dom.dimension();
  Halton seq(d, 0x5eedULL);
  const Point lo = dom.box_lower(), hi = dom.box_upper();
  std::vector<Point> out;
  std::array<double, 16> u{};
  for (std::uint64_t i = 0; static_cast<int>(out.size()) < count && i < 64ULL * count; ++i) {
    seq.point(i, std::span<double>(u.data(), static_cast<std::size_t>(d)));
    Point x(d);
    for (int j = 0; j < d; ++j) x[j] = lo[j] + u[static_cast<std::size_t>(j)] * (hi[j] - lo[j]);
    if (dom.level(x) < 0.0) out.push_back(x);
  }
  return out;
}

std::vector<Point> boundary_samples(const DomainSpec& dom, int count) {
  const int d = dom.dimension();
  Halton seq(d, 0xb0dULL);
  std::vector<Point> out;
  std::array<double, 16> u{};
  for (int i = 0; i < count; ++i) {
    seq.point(static_cast<std::uint64_t>(i), std::span<double>(u.data(), static_cast<std::size_t>(d)));
    out.push_back(dom.boundary_point(std::span<const double>(u.data(), static_cast<std::size_t>(d))));
  }
  return out;
}

std::string point_str(const Point& x) {
  std::ostringstream os;
  os << "(";
  for (Eigen::Index i = 0; i < x.size(); ++i) os << (i ? ", " : "") << x[i];
  os << ")";
  return os.str();
}

}  // namespace

Coefficients Coefficients::constant(int d, double b, double sigma_diag) {
  Coefficients c;
  for (int i = 0; i < d; ++i) c.drift.push_back(Expression::constant(b));
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) c.diffusion.push_back(Expression::constant(i == j ? sigma_diag : 0.0));
  return c;
}

ProblemSpec::ProblemSpec(DomainSpec domain, Coefficients coeffs, ConvexFunction phi, ConvexFunction psi,
                         double horizon, AssumptionConstants constants, std::string name)
    : domain_(std::move(domain)),
      coeffs_(std::move(coeffs)),
      phi_(std::move(phi)),
      psi_(std::move(psi)),
      T_(horizon),
      k_(constants),
      name_(std::move(name)) {
  const int d = domain_.dimension();
  if (!(std::isfinite(T_) && T_ > 0.0)) throw DomainError("horizon T must be positive and finite");
  if (static_cast<int>(coeffs_.drift.size()) != d)
    throw ConfigError("drift needs " + std::to_string(d) + " components");
  if (static_cast<int>(coeffs_.diffusion.size()) != d * d)
    throw ConfigError("diffusion needs " + std::to_string(d * d) + " entries");
  for (const auto& e : coeffs_.drift) require_vars(e, "drift", d, true, true, false, false);
  for (const auto& e : coeffs_.diffusion) require_vars(e, "diffusion", d, true, true, false, false);
  require_vars(coeffs_.f, "f", d, true, true, true, true);
  require_vars(coeffs_.g, "g", d, true, true, true, false);
  require_vars(coeffs_.h, "h", d, false, true, false, false);

  if (!(k_.gamma >= 0.0) || !(k_.L >= 0.0)) throw DomainError("constants gamma and L must be nonnegative");
  if (!(k_.lambda > 2.0 * k_.alpha + 2.0 * k_.L * k_.L + 1.0)) {
    std::ostringstream os;
    os << "lambda = " << k_.lambda << " must exceed 2 alpha + 2 L^2 + 1 = "
       << 2.0 * k_.alpha + 2.0 * k_.L * k_.L + 1.0;
    throw DomainError(os.str());
  }
  if (!(k_.mu > 2.0 * k_.beta + 1.0)) {
    std::ostringstream os;
    os << "mu = " << k_.mu << " must exceed 2 beta + 1 = " << 2.0 * k_.beta + 1.0;
    throw DomainError(os.str());
  }

  for (const Point& x : interior_samples(domain_, 512)) {
    const double v = h(x);
    if (!std::isfinite(v)) throw EvalError("h is not finite at " + point_str(x));
    const ExtReal pv = phi_.evaluate(v);
    if (!pv.is_finite()) throw DomainError("h(x) = " + std::to_string(v) + " leaves Dom(phi) at x = " + point_str(x));
    M_ = std::max(M_, std::abs(pv.value()));
  }
  for (const Point& x : boundary_samples(domain_, 64)) {
    const double v = h(x);
    if (!std::isfinite(v)) throw EvalError("h is not finite at " + point_str(x));
    const ExtReal pv = phi_.evaluate(v);
    const ExtReal qv = psi_.evaluate(v);
    if (!pv.is_finite()) throw DomainError("h(x) = " + std::to_string(v) + " leaves Dom(phi) at x = " + point_str(x));
    if (!qv.is_finite()) throw DomainError("h(x) = " + std::to_string(v) + " leaves Dom(psi) at x = " + point_str(x));
    M_ = std::max({M_, std::abs(pv.value()), std::abs(qv.value())});
  }
}

ProblemSpec ProblemSpec::time_reversed() const {
  ProblemSpec out = *this;
  out.reversed_ = !reversed_;
  return out;
}

Point ProblemSpec::b(double s, const Point& x) const {
  const int d = dimension();
  Point out(d);
  const EvalArgs a{phys(s), as_span(x), 0.0, {}};
  for (int i = 0; i < d; ++i) out[i] = coeffs_.drift[static_cast<std::size_t>(i)](a);
  return out;
}

SquareMatrix ProblemSpec::sigma(double s, const Point& x) const {
  const int d = dimension();
  SquareMatrix out(d, d);
  const EvalArgs a{phys(s), as_span(x), 0.0, {}};
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) out(i, j) = coeffs_.diffusion[static_cast<std::size_t>(i * d + j)](a);
  return out;
}

double ProblemSpec::f(double s, const Point& x, double y, const Point& z) const {
  return coeffs_.f(EvalArgs{phys(s), as_span(x), y, as_span(z)});
}

double ProblemSpec::g(double s, const Point& x, double y) const {
  return coeffs_.g(EvalArgs{phys(s), as_span(x), y, {}});
}

double ProblemSpec::h(const Point& x) const { return coeffs_.h(EvalArgs{0.0, as_span(x), 0.0, {}}); }

bool ProblemSpec::drift_depends_on_t() const {
  for (const auto& e : coeffs_.drift)
    if (e.depends_on_t()) return true;
  return false;
}

bool ProblemSpec::diffusion_depends_on_t() const {
  for (const auto& e : coeffs_.diffusion)
    if (e.depends_on_t()) return true;
  return false;
}

bool ProblemSpec::autonomous() const {
  return !drift_depends_on_t() && !diffusion_depends_on_t() && !coeffs_.f.depends_on_t() &&
         !coeffs_.g.depends_on_t();
}

namespace presets {

ProblemSpec neumann_heat(double horizon) {
  Coefficients c = Coefficients::constant(1, 0.0, 1.0);
  c.h = Expression::parse("cos(pi*x1)");
  return ProblemSpec(DomainSpec::interval(0.0, 1.0), std::move(c), ConvexFunction::zero(),
                     ConvexFunction::zero(), horizon, AssumptionConstants{}, "neumann_heat");
}

ProblemSpec obstacle(double sigma, double horizon) {
  Coefficients c = Coefficients::constant(1, 0.0, sigma);
  c.f = Expression::constant(-1.0);
  AssumptionConstants k;
  k.gamma = 1.0;
  return ProblemSpec(DomainSpec::interval(0.0, 1.0), std::move(c), ConvexFunction::half_line_lower(0.0),
                     ConvexFunction::zero(), horizon, k, "obstacle");
}

ProblemSpec linear_decay(double lambda0, double xi, double horizon) {
  Coefficients c = Coefficients::constant(1, 0.0, 0.0);
  char buf[64];
  std::snprintf(buf, sizeof buf, "-(%.17g)*y", lambda0);
  c.f = Expression::parse(buf);
  c.h = Expression::constant(xi);
  AssumptionConstants k;
  k.alpha = -lambda0;
  k.gamma = std::abs(lambda0);
  return ProblemSpec(DomainSpec::interval(-1.0, 1.0), std::move(c), ConvexFunction::zero(),
                     ConvexFunction::zero(), horizon, k, "linear_decay");
}

ProblemSpec ball_diffusion(int d, double horizon) {
  Coefficients c = Coefficients::constant(d, 0.0, 1.0);
  return ProblemSpec(DomainSpec::ball(Point::Zero(d), 1.0), std::move(c), ConvexFunction::zero(),
                     ConvexFunction::zero(), horizon, AssumptionConstants{}, "ball_diffusion");
}

}  // namespace presets

}  // namespace pvi
