#pragma once

#include <array>
#include <cstdint>
#include <span>

namespace pvi {

// Philox4x32-10 (Salmon et al. 2011). Stateless: the output block is a pure
// function of (counter, key), which is what makes path simulation independent
// of how paths are scheduled over threads.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

// Uniform in the open interval (0, 1) from the top 52 bits of a 64-bit word.
// With 53 bits the largest value 1 - 2^-54 would round to 1.
inline double uniform_open(std::uint64_t bits) {
  return (static_cast<double>(bits >> 12) + 0.5) * 0x1.0p-52;
}

// Standard normal quantile, Wichura's AS241 (PPND16), about 1e-16 relative.
double inverse_normal_cdf(double p);

// Addresses one Philox block: (seed) -> key, (step, path, chunk, stream) -> counter.
struct RngAddress {
  std::uint64_t seed = 0;
  std::uint32_t stream = 0;
  std::uint32_t path = 0;
  std::uint32_t step = 0;
};

// Fills `out` with standard normals for the given address. Two normals per
// Philox block; block i of the request uses chunk index i.
void fill_normals(const RngAddress& at, std::span<double> out);

// Same, uniforms in (0, 1).
void fill_uniforms(const RngAddress& at, std::span<double> out);

// Randomly shifted Halton sequence in dimension <= 16. Point i is the radical
// inverse of i + 1 in the first `dim` primes, rotated modulo 1 by a shift drawn
// from `seed`.
class Halton {
 public:
  Halton(int dim, std::uint64_t seed);
  int dimension() const { return dim_; }
  void point(std::uint64_t index, std::span<double> out) const;

 private:
  int dim_;
  std::array<double, 16> shift_{};
};

}  // namespace pvi
