#include "pvi/regression.hpp"

#include <cmath>
#include <limits>

#include "pvi/errors.hpp"
#include "pvi/parallel.hpp"

namespace pvi {

namespace {

constexpr double kRidgeCondition = 1e10;
constexpr double kRidgeScale = 1e-10;

// Sum over rows of add(i, acc) into a width-sized accumulator, blockwise.
template <class Add>
std::vector<double> blocked_sum(int n, int width, bool parallel, Add add) {
  const int n_blocks = (n + kReductionBlock - 1) / kReductionBlock;
  std::vector<double> partial(static_cast<std::size_t>(n_blocks) * static_cast<std::size_t>(width), 0.0);
  auto body = [&](int blk) {
    double* acc = partial.data() + static_cast<std::size_t>(blk) * static_cast<std::size_t>(width);
    const int hi = std::min(n, (blk + 1) * kReductionBlock);
    for (int i = blk * kReductionBlock; i < hi; ++i) add(i, acc);
  };
  if (parallel) parallel_for(n_blocks, body); else serial_for(n_blocks, body);
  std::vector<double> total(static_cast<std::size_t>(width), 0.0);
  for (int blk = 0; blk < n_blocks; ++blk)
    for (int c = 0; c < width; ++c)
      total[static_cast<std::size_t>(c)] += partial[static_cast<std::size_t>(blk) * width + c];
  return total;
}

}  // namespace

std::vector<std::vector<int>> monomial_exponents(int dims, int degree) {
  std::vector<std::vector<int>> out;
  std::vector<int> e(static_cast<std::size_t>(dims), 0);
  for (int total = 1; total <= degree; ++total) {
    // All compositions of `total` into `dims` nonnegative parts, lexicographically descending.
    auto rec = [&](auto&& self, int pos, int left) -> void {
      if (pos == dims - 1) {
        e[static_cast<std::size_t>(pos)] = left;
        out.push_back(e);
        return;
      }
      for (int v = left; v >= 0; --v) {
        e[static_cast<std::size_t>(pos)] = v;
        self(self, pos + 1, left - v);
      }
    };
    if (dims > 0) rec(rec, 0, total);
  }
  return out;
}

Regressor::Regressor(const DomainSpec& domain, const PathBundle& paths, int k, int degree, bool parallel)
    : n_(paths.n_paths), parallel_(parallel) {
  if (degree < 0) throw PreconditionError("regression degree must be >= 0");
  const int d = paths.dim;
  const double* X = paths.states.data() + paths.slot(k, 0) * static_cast<std::size_t>(d);
  const double n = static_cast<double>(n_);

  // Coordinate standardisation.
  std::vector<double> mean = blocked_sum(n_, d, parallel_, [&](int i, double* acc) {
    for (int c = 0; c < d; ++c) acc[c] += X[static_cast<std::size_t>(i) * d + c];
  });
  for (double& m : mean) m /= n;
  std::vector<double> var = blocked_sum(n_, d, parallel_, [&](int i, double* acc) {
    for (int c = 0; c < d; ++c) {
      const double u = X[static_cast<std::size_t>(i) * d + c] - mean[static_cast<std::size_t>(c)];
      acc[c] += u * u;
    }
  });
  std::vector<int> active;
  std::vector<double> scale(static_cast<std::size_t>(d), 1.0);
  for (int c = 0; c < d; ++c) {
    const double sd = std::sqrt(var[static_cast<std::size_t>(c)] / n);
    if (sd > 1e-12 * std::max(1.0, std::abs(mean[static_cast<std::size_t>(c)]))) {
      active.push_back(c);
      scale[static_cast<std::size_t>(c)] = 1.0 / sd;
    }
  }

  const auto expo = monomial_exponents(static_cast<int>(active.size()), degree);
  const bool use_level = degree >= 1 && !active.empty() && !(domain.level_is_quadratic() && degree >= 2);
  const int p_raw = static_cast<int>(expo.size()) + (use_level ? 1 : 0);

  Eigen::MatrixXd raw(n_, p_raw);
  auto fill_row = [&](int i) {
    std::array<double, kMaxDim> u{};
    for (std::size_t a = 0; a < active.size(); ++a) {
      const int c = active[a];
      u[a] = (X[static_cast<std::size_t>(i) * d + c] - mean[static_cast<std::size_t>(c)]) *
             scale[static_cast<std::size_t>(c)];
    }
    for (std::size_t j = 0; j < expo.size(); ++j) {
      double v = 1.0;
      for (std::size_t a = 0; a < active.size(); ++a)
        for (int r = 0; r < expo[j][a]; ++r) v *= u[a];
      raw(i, static_cast<Eigen::Index>(j)) = v;
    }
    if (use_level) {
      Point x(d);
      for (int c = 0; c < d; ++c) x[c] = X[static_cast<std::size_t>(i) * d + c];
      raw(i, p_raw - 1) = domain.level(x);
    }
  };
  if (parallel_) parallel_for(n_, fill_row); else serial_for(n_, fill_row);

  // Centre and scale feature columns; drop the ones with no spread.
  std::vector<double> fmean = blocked_sum(n_, p_raw, parallel_, [&](int i, double* acc) {
    for (int j = 0; j < p_raw; ++j) acc[j] += raw(i, j);
  });
  for (double& m : fmean) m /= n;
  std::vector<double> fvar = blocked_sum(n_, p_raw, parallel_, [&](int i, double* acc) {
    for (int j = 0; j < p_raw; ++j) {
      const double u = raw(i, j) - fmean[static_cast<std::size_t>(j)];
      acc[j] += u * u;
    }
  });
  std::vector<int> keep;
  std::vector<double> fscale;
  for (int j = 0; j < p_raw; ++j) {
    const double sd = std::sqrt(fvar[static_cast<std::size_t>(j)] / n);
    if (sd > 1e-10 * std::max(1.0, std::abs(fmean[static_cast<std::size_t>(j)]))) {
      keep.push_back(j);
      fscale.push_back(1.0 / sd);
    }
  }
  const int p = static_cast<int>(keep.size());
  G_.resize(n_, p);
  auto fill_g = [&](int i) {
    for (int j = 0; j < p; ++j) {
      const int s = keep[static_cast<std::size_t>(j)];
      G_(i, j) = (raw(i, s) - fmean[static_cast<std::size_t>(s)]) * fscale[static_cast<std::size_t>(j)];
    }
  };
  if (parallel_) parallel_for(n_, fill_g); else serial_for(n_, fill_g);
  if (p == 0) return;

  std::vector<double> gram = blocked_sum(n_, p * p, parallel_, [&](int i, double* acc) {
    for (int a = 0; a < p; ++a) {
      const double ga = G_(i, a);
      for (int b = 0; b <= a; ++b) acc[a * p + b] += ga * G_(i, b);
    }
  });
  Eigen::MatrixXd C(p, p);
  for (int a = 0; a < p; ++a)
    for (int b = 0; b <= a; ++b) C(a, b) = C(b, a) = gram[static_cast<std::size_t>(a * p + b)] / n;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(C, Eigen::EigenvaluesOnly);
  const double lmax = es.eigenvalues().maxCoeff();
  const double lmin = es.eigenvalues().minCoeff();
  if (!std::isfinite(lmax) || !(lmax > 0.0)) throw RegressionError("regression: degenerate normal equations");
  cond_ = lmin > 0.0 ? lmax / lmin : std::numeric_limits<double>::infinity();
  if (cond_ > kRidgeCondition) {
    ridge_ = true;
    C.diagonal().array() += kRidgeScale * lmax;
  }
  solver_.compute(C);
  if (solver_.info() != Eigen::Success) throw RegressionError("regression: factorisation failed");
}

Eigen::MatrixXd Regressor::fit(const Eigen::MatrixXd& targets, RegressionDiagnostics* diag) const {
  if (targets.rows() != n_) throw ShapeError("regression: target rows do not match paths");
  const int m = static_cast<int>(targets.cols());
  const int p = static_cast<int>(G_.cols());
  const double n = static_cast<double>(n_);

  std::vector<double> ysum = blocked_sum(n_, m, parallel_, [&](int i, double* acc) {
    for (int c = 0; c < m; ++c) acc[c] += targets(i, c);
  });
  std::vector<double> ymean(static_cast<std::size_t>(m));
  for (int c = 0; c < m; ++c) ymean[static_cast<std::size_t>(c)] = ysum[static_cast<std::size_t>(c)] / n;

  Eigen::MatrixXd beta = Eigen::MatrixXd::Zero(p, m);
  if (p > 0) {
    std::vector<double> rhs = blocked_sum(n_, p * m, parallel_, [&](int i, double* acc) {
      for (int c = 0; c < m; ++c) {
        const double y = targets(i, c) - ymean[static_cast<std::size_t>(c)];
        for (int a = 0; a < p; ++a) acc[c * p + a] += G_(i, a) * y;
      }
    });
    Eigen::MatrixXd R(p, m);
    for (int c = 0; c < m; ++c)
      for (int a = 0; a < p; ++a) R(a, c) = rhs[static_cast<std::size_t>(c * p + a)] / n;
    beta = solver_.solve(R);
    if (!beta.allFinite()) throw RegressionError("regression: non-finite coefficients");
  }

  Eigen::MatrixXd fitted(n_, m);
  auto predict = [&](int i) {
    for (int c = 0; c < m; ++c) {
      double v = 0.0;
      for (int a = 0; a < p; ++a) v += G_(i, a) * beta(a, c);
      fitted(i, c) = ymean[static_cast<std::size_t>(c)] + v;
    }
  };
  if (parallel_) parallel_for(n_, predict); else serial_for(n_, predict);

  if (diag) {
    diag->n_features = p;
    diag->condition_number = cond_;
    diag->ridge = ridge_;
    std::vector<double> rss = blocked_sum(n_, 1, parallel_, [&](int i, double* acc) {
      const double r = targets(i, 0) - fitted(i, 0);
      acc[0] += r * r;
    });
    diag->residual_rms = std::sqrt(rss[0] / n);
  }
  return fitted;
}

}  // namespace pvi
