#pragma once

// Self-contained reference implementations the tests check the library
// against.  Everything here is deliberately naive and independent of the
// headers under test.

#include <cstdint>
#include <utility>
#include <vector>

namespace ref {

inline std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>((static_cast<unsigned __int128>(a) * b) % m);
}

inline std::uint64_t powmod(std::uint64_t base, std::uint64_t exp, std::uint64_t m) {
  std::uint64_t acc = 1 % m;
  base %= m;
  while (exp) {
    if (exp & 1) acc = mulmod(acc, base, m);
    base = mulmod(base, base, m);
    exp >>= 1;
  }
  return acc;
}

// Euler's criterion; p must be an odd prime.
inline int legendre(std::uint64_t a, std::uint64_t p) {
  a %= p;
  if (a == 0) return 0;
  return powmod(a, (p - 1) / 2, p) == 1 ? 1 : -1;
}

inline std::vector<std::pair<std::uint64_t, unsigned>> factor_trial(std::uint64_t n) {
  std::vector<std::pair<std::uint64_t, unsigned>> out;
  for (std::uint64_t d = 2; d * d <= n; ++d) {
    if (n % d) continue;
    unsigned e = 0;
    while (n % d == 0) {
      n /= d;
      ++e;
    }
    out.emplace_back(d, e);
  }
  if (n > 1) out.emplace_back(n, 1);
  return out;
}

inline bool prime_trial(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

inline bool squarefree_trial(std::uint64_t n) {
  for (const auto& [p, e] : factor_trial(n))
    if (e > 1) return false;
  return true;
}

// Number of affine solutions of y^2 = x^3 - b*x modulo m, via a table of
// square counts.  Works for any modulus, prime or not.
inline std::uint64_t affine_count(std::uint64_t m, std::uint64_t b) {
  std::vector<std::uint32_t> squares(m, 0);
  for (std::uint64_t y = 0; y < m; ++y) ++squares[mulmod(y, y, m)];
  std::uint64_t total = 0;
  for (std::uint64_t x = 0; x < m; ++x) {
    std::uint64_t rhs = mulmod(x, x, m);
    rhs = (rhs + m - b % m) % m;
    rhs = mulmod(rhs, x, m);
    total += squares[rhs];
  }
  return total;
}

// Deterministic 64-bit mixer for sampling in tests.
inline std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace ref
