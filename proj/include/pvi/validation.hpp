#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pvi/problem.hpp"

namespace pvi {

// Box for the y and z arguments when sampling coefficient functions.
struct SampleRanges {
  double y_lo = -10.0;
  double y_hi = 10.0;
  double z_lo = -10.0;
  double z_hi = 10.0;
};

// `margin` is the worst observed excess over the allowed bound: positive means
// violated. `value` is the raw statistic (a sup of quotients, a bound M, ...).
struct CheckEntry {
  std::string name;
  bool passed = true;
  double margin = 0.0;
  double value = 0.0;
  std::string detail;
};

struct ValidationReport {
  std::vector<CheckEntry> entries;
  bool all_passed() const;
  const CheckEntry* find(const std::string& name) const;
};

struct CompatEntry {
  double eps;
  CheckEntry yosida_product;   // grad phi_eps(y) * grad psi_eps(y) >= 0
  CheckEntry boundary_g;       // grad phi_eps(y) g <= [grad psi_eps(y) g]^+ on the boundary
  CheckEntry interior_f;       // grad psi_eps(y) f <= [grad phi_eps(y) f]^+ in the closed domain
};

struct CompatReport {
  std::vector<CompatEntry> per_eps;
  // Worst margin per condition across all eps.
  CheckEntry yosida_product;
  CheckEntry boundary_g;
  CheckEntry interior_f;
  bool all_passed() const { return yosida_product.passed && boundary_g.passed && interior_f.passed; }
};

// Quasi-random sampling certificates for the standing hypotheses:
//   lipschitz_b_sigma      |b(t,x)-b(t,x')| + |sigma(t,x)-sigma(t,x')|_F <= L |x-x'|
//   f_monotone_y           (y-y')(f(y)-f(y')) <= alpha |y-y'|^2
//   g_monotone_y           (y-y')(g(y)-g(y')) <= beta |y-y'|^2 on the boundary
//   f_lipschitz_z          |f(z)-f(z')| <= L |z-z'|
//   f_growth, g_growth     |f(t,x,y,0)|, |g(t,u,y)| <= gamma (1 + |y|)
//   initial_bound          sup |phi(h)|, |psi(h)| (reported, passes when finite)
//   boundary_unit_normal   ||grad level| - 1| <= 1e-8 on the boundary
// Throws EvalError if a coefficient evaluates to a non-finite number.
ValidationReport validate_assumptions(const ProblemSpec& p, int n_samples, std::uint64_t seed,
                                      const SampleRanges& ranges = {});

CompatReport check_compatibility(const ProblemSpec& p, const std::vector<double>& eps_list,
                                 int n_samples, std::uint64_t seed, const SampleRanges& ranges = {});

// Hypotheses of the comparison principle:
//   g_decreasing_in_y      g(t,u,r') <= g(t,u,r) for r' > r on the boundary
//   f_x_modulus            sup |f(t,x,r,p)-f(t,x',r,p)| / (|x-x'| (1+|p|)), passes when finite
ValidationReport uniqueness_hypotheses_check(const ProblemSpec& p, int n_samples, std::uint64_t seed,
                                             const SampleRanges& ranges = {});

}  // namespace pvi
