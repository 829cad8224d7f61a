#include "pvi/rng.hpp"

#include <cmath>
#include <limits>

#include "pvi/errors.hpp"

namespace pvi {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

std::array<std::uint32_t, 4> block_for(const RngAddress& at, std::uint32_t chunk) {
  return philox4x32({at.step, at.path, chunk, at.stream},
                    {static_cast<std::uint32_t>(at.seed), static_cast<std::uint32_t>(at.seed >> 32)});
}

inline std::uint64_t join(std::uint32_t hi, std::uint32_t lo) {
  return (static_cast<std::uint64_t>(hi) << 32) | lo;
}

double poly(const double* c, double r) {
  double s = c[7];
  for (int i = 6; i >= 0; --i) s = s * r + c[i];
  return s;
}

constexpr double kA[8] = {3.387132872796366608,   133.14166789178437745, 1971.5909503065514427,
                          13731.693765509461125,  45921.953931549871457, 67265.770927008700853,
                          33430.575583588128105,  2509.0809287301226727};
constexpr double kB[8] = {1.0,                    42.313330701600911252, 687.1870074920579083,
                          5394.1960214247511077,  21213.794301586595867, 39307.89580009271061,
                          28729.085735721942674,  5226.495278852545925};
constexpr double kC[8] = {1.42343711074968357734,  4.6303378461565452959,   5.7694972214606914055,
                          3.64784832476320460504,  1.27045825245236838258,  0.24178072517745061177,
                          0.0227238449892691845833, 7.7454501427834140764e-4};
constexpr double kD[8] = {1.0,                     2.05319162663775882187,  1.6763848301838038494,
                          0.68976733498510000455,  0.14810397642748007459,  0.0151986665636164571966,
                          5.475938084995344946e-4, 1.05075007164441684324e-9};
constexpr double kE[8] = {6.6579046435011037772,    5.4637849111641143699,   1.7848265399172913358,
                          0.29656057182850489123,   0.026532189526576123093, 0.0012426609473880784386,
                          2.71155556874348757815e-5, 2.01033439929228813265e-7};
constexpr double kF[8] = {1.0,                     0.59983220655588793769,  0.13692988092273580531,
                          0.0148753612908506148525, 7.868691311456132591e-4, 1.8463183175100546818e-5,
                          1.4215117583164458887e-7, 2.04426310338993978564e-15};

constexpr int kPrimes[16] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> c, std::array<std::uint32_t, 2> k) {
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, c[0], hi0, lo0);
    mulhilo(kMul1, c[2], hi1, lo1);
    c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
    k[0] += kWeyl0;
    k[1] += kWeyl1;
  }
  return c;
}

double inverse_normal_cdf(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    if (p == 0.0) return -std::numeric_limits<double>::infinity();
    if (p == 1.0) return std::numeric_limits<double>::infinity();
    throw DomainError("inverse_normal_cdf: p must lie in [0, 1]");
  }
  const double q = p - 0.5;
  if (std::abs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    return q * poly(kA, r) / poly(kB, r);
  }
  double r = std::sqrt(-std::log(q < 0.0 ? p : 1.0 - p));
  double x;
  if (r <= 5.0) {
    r -= 1.6;
    x = poly(kC, r) / poly(kD, r);
  } else {
    r -= 5.0;
    x = poly(kE, r) / poly(kF, r);
  }
  return q < 0.0 ? -x : x;
}

void fill_uniforms(const RngAddress& at, std::span<double> out) {
  for (std::size_t i = 0; i < out.size(); i += 2) {
    const auto b = block_for(at, static_cast<std::uint32_t>(i / 2));
    out[i] = uniform_open(join(b[0], b[1]));
    if (i + 1 < out.size()) out[i + 1] = uniform_open(join(b[2], b[3]));
  }
}

void fill_normals(const RngAddress& at, std::span<double> out) {
  fill_uniforms(at, out);
  for (double& v : out) v = inverse_normal_cdf(v);
}

Halton::Halton(int dim, std::uint64_t seed) : dim_(dim) {
  if (dim < 1 || dim > 16) throw PreconditionError("Halton dimension must be in [1, 16]");
  RngAddress at{seed, 0xC0FFEEu, 0, 0};
  fill_uniforms(at, std::span<double>(shift_.data(), static_cast<std::size_t>(dim)));
}

void Halton::point(std::uint64_t index, std::span<double> out) const {
  for (int j = 0; j < dim_; ++j) {
    const int base = kPrimes[j];
    const double inv = 1.0 / base;
    double f = inv, r = 0.0;
    for (std::uint64_t n = index + 1; n > 0; n /= static_cast<std::uint64_t>(base)) {
      r += f * static_cast<double>(n % static_cast<std::uint64_t>(base));
      f *= inv;
    }
    double u = r + shift_[static_cast<std::size_t>(j)];
    u -= std::floor(u);
    if (u <= 0.0) u = 0x1.0p-53;
    out[static_cast<std::size_t>(j)] = u;
  }
}

}  // namespace pvi
