#pragma once

#include <string>
#include <vector>

#include "pvi/convex.hpp"
#include "pvi/domain.hpp"
#include "pvi/expression.hpp"

namespace pvi {

// b(t,x) in R^d, sigma(t,x) in R^{dxd} (row-major), f(t,x,y,z), g(t,x,y), h(x).
struct Coefficients {
  std::vector<Expression> drift;
  std::vector<Expression> diffusion;
  Expression f;
  Expression g;
  Expression h;

  static Coefficients constant(int d, double b, double sigma_diag);
};

struct AssumptionConstants {
  double alpha = 0.0;  // y-monotonicity of f
  double beta = 0.0;   // y-monotonicity of g
  double gamma = 0.0;  // growth of f, g
  double L = 0.0;      // Lipschitz constant of b, sigma and of f in z
  double lambda = 1.5;
  double mu = 1.5;
};

// Forward problem on [0, T] x D:
//   du/dt - L_t u + d phi(u) ∋ f(t, x, u, sigma^T grad u)   in D
//   du/dn + d psi(u) ∋ g(t, x, u)                          on the boundary
//   u(0, x) = h(x)
// with the outward normal n = grad(level).
class ProblemSpec {
 public:
  // Validates dimensions, expression variables, the weight inequalities
  // lambda > 2 alpha + 2 L^2 + 1, mu > 2 beta + 1, and h(x) in Dom(phi) on
  // interior samples / Dom(psi) on boundary samples.
  ProblemSpec(DomainSpec domain, Coefficients coeffs, ConvexFunction phi, ConvexFunction psi,
              double horizon, AssumptionConstants constants, std::string name = {});

  const DomainSpec& domain() const { return domain_; }
  const Coefficients& coefficients() const { return coeffs_; }
  const ConvexFunction& phi() const { return phi_; }
  const ConvexFunction& psi() const { return psi_; }
  double horizon() const { return T_; }
  const AssumptionConstants& constants() const { return k_; }
  const std::string& name() const { return name_; }
  int dimension() const { return domain_.dimension(); }
  // sup of |phi(h)|, |psi(h)| over the construction samples.
  double initial_bound() const { return M_; }

  // Coefficients in backward time s: evaluated at physical time T - s when
  // reversed(), else at s.
  bool reversed() const { return reversed_; }
  ProblemSpec time_reversed() const;

  Point b(double s, const Point& x) const;
  SquareMatrix sigma(double s, const Point& x) const;
  double f(double s, const Point& x, double y, const Point& z) const;
  double g(double s, const Point& x, double y) const;
  double h(const Point& x) const;

  bool drift_depends_on_t() const;
  bool diffusion_depends_on_t() const;
  bool autonomous() const;
  // f and g ignore y; the implicit step then reduces to a prox step.
  bool generator_free_of_y() const { return !coeffs_.f.depends_on_y() && !coeffs_.g.depends_on_y(); }
  bool f_depends_on_z() const { return coeffs_.f.depends_on_z(); }

 private:
  double phys(double s) const { return reversed_ ? T_ - s : s; }

  DomainSpec domain_;
  Coefficients coeffs_;
  ConvexFunction phi_;
  ConvexFunction psi_;
  double T_;
  AssumptionConstants k_;
  std::string name_;
  double M_ = 0.0;
  bool reversed_ = false;
};

namespace presets {

// Reflected Brownian motion on [0, 1], h = cos(pi x), f = g = 0, T = 1/2.
ProblemSpec neumann_heat(double horizon = 0.5);
// [0, 1] with f = -1, phi = indicator of [0, inf), h = 0.
ProblemSpec obstacle(double sigma, double horizon = 1.0);
// f = -lambda0 y, sigma = 0, h = xi on [-1, 1].
ProblemSpec linear_decay(double lambda0, double xi, double horizon = 1.0);
// Reflected Brownian motion in the unit ball of R^d with h = 0.
ProblemSpec ball_diffusion(int d, double horizon = 1.0);

}  // namespace presets

}  // namespace pvi
