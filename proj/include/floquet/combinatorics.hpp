#pragma once

#include <cstdint>

#include "floquet/error.hpp"

namespace floquet {

/// C(a, b) with C(a, b) = 0 for b < 0 or b > a.
inline std::int64_t binomial(std::int64_t a, std::int64_t b) {
  if (b < 0 || a < 0 || b > a) return 0;
  if (b > a - b) b = a - b;
  std::int64_t r = 1;
  for (std::int64_t i = 1; i <= b; ++i) r = r * (a - b + i) / i;
  return r;
}

/// Dimension of the space of scalar polynomials of degree <= N in n variables.
inline std::int64_t q_dim(std::int64_t n, std::int64_t N) {
  if (N < 0) return 0;
  return binomial(n + N, N);
}

/// Dimension of harmonic polynomials of degree <= N in n variables.
inline std::int64_t h_dim(std::int64_t n, std::int64_t N) { return q_dim(n, N) - q_dim(n, N - 2); }

struct CombinatoricsTable {
  std::int64_t n = 0;
  std::int64_t N = 0;
  std::int64_t q = 0;
  std::int64_t h = 0;
};

inline CombinatoricsTable combinatorics(std::int64_t n, std::int64_t N) {
  if (n < 0 || N < 0) fail(ErrorKind::precondition, "combinatorics: n and N must be nonnegative");
  return {n, N, q_dim(n, N), h_dim(n, N)};
}

}  // namespace floquet
