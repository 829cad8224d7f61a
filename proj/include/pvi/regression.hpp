#pragma once

#include <vector>

#include <Eigen/Dense>

#include "pvi/domain.hpp"
#include "pvi/reflected_sde.hpp"

namespace pvi {

struct RegressionDiagnostics {
  int n_features = 0;             // excluding the intercept
  double condition_number = 1.0;  // of the feature correlation matrix
  bool ridge = false;
  double residual_rms = 0.0;      // first target
};

// Rows processed per reduction block. Partial sums are formed per block and
// added in block order, so results do not depend on the thread count.
inline constexpr int kReductionBlock = 4096;

// Least-squares projection onto span{1, features(X_k)} across paths.
//
// Features: monomials of total degree 1..degree in the coordinates of X_k,
// each coordinate standardised by its sample mean and deviation, plus the
// level function (omitted when it is itself a quadratic polynomial and
// degree >= 2). Coordinates or features with no spread are dropped, so a
// deterministic state reduces to the sample mean. Columns are centred and
// scaled before solving the normal equations; a ridge of 1e-10 times the
// largest eigenvalue is added when the condition number exceeds 1e10.
class Regressor {
 public:
  Regressor(const DomainSpec& domain, const PathBundle& paths, int k, int degree, bool parallel = true);

  int n_rows() const { return n_; }
  int n_features() const { return static_cast<int>(G_.cols()); }

  // targets: n_rows x m. Returns the fitted values with the same shape.
  Eigen::MatrixXd fit(const Eigen::MatrixXd& targets, RegressionDiagnostics* diag = nullptr) const;

 private:
  int n_;
  bool parallel_;
  Eigen::MatrixXd G_;  // centred, unit-variance features (n x p)
  Eigen::LDLT<Eigen::MatrixXd> solver_;
  double cond_ = 1.0;
  bool ridge_ = false;
};

// Multi-indices of total degree 1..degree over `dims` variables, graded then
// lexicographic.
std::vector<std::vector<int>> monomial_exponents(int dims, int degree);

}  // namespace pvi
