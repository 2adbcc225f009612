#pragma once

// Fixed-seed linear congruential generator for reproducible test matrices:
//   x_{k+1} = 6364136223846793005 x_k + 1442695040888963407  (mod 2^64)

#include "qxform/fock.hpp"

#include <cstdint>

namespace qxform {

class Lcg {
 public:
  explicit Lcg(std::uint64_t seed = 42) : state_(seed) {}

  std::uint64_t next() {
    state_ = 6364136223846793005ULL * state_ + 1442695040888963407ULL;
    return state_;
  }
  // Top 53 bits mapped onto [-1, 1).
  double uniform() { return 2.0 * static_cast<double>(next() >> 11) * 0x1.0p-53 - 1.0; }

 private:
  std::uint64_t state_;
};

// Entries (re, im) drawn row-major from the generator, then (A + A^dag) / 2.
inline ComplexMatrix random_hermitian(Lcg& rng, std::size_t n) {
  ComplexMatrix a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const double re = rng.uniform();
      const double im = rng.uniform();
      a(i, j) = cplx{re, im};
    }
  return 0.5 * (a + a.adjoint());
}

}  // namespace qxform
