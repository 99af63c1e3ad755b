#ifndef USM_RNG_HPP
#define USM_RNG_HPP

#include <cmath>
#include <complex>
#include <cstdint>

#include "usm/types.hpp"

namespace usm {

/// Counter-based deterministic generator (splitmix64 core). Identical output
/// for a given seed on every platform; streams never share state.
class CounterRng {
 public:
  explicit CounterRng(uint64_t seed) : seed_(seed) {}

  uint64_t next_u64() {
    uint64_t z = seed_ + (++counter_) * 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1).
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller.
  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    double u2 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 2.0 * M_PI * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  /// CN(0,1): unit-variance circularly symmetric complex Gaussian.
  Complex cgaussian() {
    double re = gaussian();
    double im = gaussian();
    return Complex(re * M_SQRT1_2, im * M_SQRT1_2);
  }

  CMatrix cgaussian_matrix(int rows, int cols) {
    CMatrix m(rows, cols);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) m(i, j) = cgaussian();
    return m;
  }

  RealMatrix gaussian_matrix(int rows, int cols) {
    RealMatrix m(rows, cols);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) m(i, j) = gaussian();
    return m;
  }

 private:
  uint64_t seed_;
  uint64_t counter_ = 0;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

/// Derives an independent stream key from a seed and a stream tag.
inline uint64_t stream_key(uint64_t seed, uint64_t tag) {
  uint64_t z = seed ^ (tag * 0xd1342543de82ef95ULL + 0x2545f4914f6cdd1dULL);
  z = (z ^ (z >> 33)) * 0xff51afd7ed558ccdULL;
  return z ^ (z >> 33);
}

}  // namespace usm

#endif
