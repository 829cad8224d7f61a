#pragma once

#include <cmath>
#include <cstddef>
#include <span>

namespace pvi {

// Pairwise summation in index order; the result depends only on the data.
inline double pairwise_sum(std::span<const double> v) {
  if (v.size() <= 16) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t h = v.size() / 2;
  return pairwise_sum(v.first(h)) + pairwise_sum(v.subspan(h));
}

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};

// Sample mean and standard error sd / sqrt(n) (sd with n - 1 denominator).
inline MeanSe mean_se(std::span<const double> v) {
  MeanSe out;
  const std::size_t n = v.size();
  if (n == 0) return out;
  out.mean = pairwise_sum(v) / static_cast<double>(n);
  if (n < 2) return out;
  double ss = 0.0, c = 0.0;
  for (double x : v) {
    const double d = x - out.mean;
    ss += d * d;
    c += d;
  }
  const double var = (ss - c * c / static_cast<double>(n)) / static_cast<double>(n - 1);
  out.se = std::sqrt(std::max(0.0, var) / static_cast<double>(n));
  return out;
}

}  // namespace pvi
