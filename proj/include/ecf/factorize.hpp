#pragma once

// Trusted factorization utilities: deterministic Miller-Rabin primality for
// the supported width, Brent's rho for the cofactors left by bounded trial
// division, and the square-freeness predicate built on top.  These back the
// oracle simulator; the factoring algorithms themselves never call them on
// the number under attack.

#include "ecf/integer.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <vector>

namespace ecf {

struct Factorization {
  // (prime, exponent) pairs sorted by prime.
  std::vector<std::pair<Natural, unsigned>> factors;

  bool squarefree() const {
    for (const auto& [p, e] : factors)
      if (e > 1) return false;
    return true;
  }
};

namespace detail {

inline std::uint64_t mulmod_u64(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>((static_cast<unsigned __int128>(a) * b) % m);
}

inline std::uint64_t powmod_u64(std::uint64_t base, std::uint64_t exp, std::uint64_t m) {
  if (m == 1) return 0;
  std::uint64_t result = 1;
  base %= m;
  while (exp > 0) {
    if (exp & 1) result = mulmod_u64(result, base, m);
    base = mulmod_u64(base, base, m);
    exp >>= 1;
  }
  return result;
}

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Witness set deterministic for every n < 3.3e24; far beyond desk scale.
inline constexpr std::uint64_t kMillerRabinBases[] = {2,  3,  5,  7,  11, 13,
                                                     17, 19, 23, 29, 31, 37};

inline bool miller_rabin_u64(std::uint64_t n) {
  for (std::uint64_t p : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    if (n == p) return true;
    if (n % p == 0) return false;
  }
  if (n < 2) return false;
  std::uint64_t d = n - 1;
  unsigned s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  for (std::uint64_t a : kMillerRabinBases) {
    std::uint64_t x = powmod_u64(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (unsigned r = 1; r < s; ++r) {
      x = mulmod_u64(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

inline bool miller_rabin_big(const Natural& n) {
  for (std::uint64_t p : kMillerRabinBases) {
    if (n == p) return true;
    if (n % p == 0) return false;
  }
  Natural d = n - 1;
  unsigned s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  for (std::uint64_t a : kMillerRabinBases) {
    Natural x = powmod(Natural(a), d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (unsigned r = 1; r < s; ++r) {
      x = (x * x) % n;
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

// Brent's cycle variant of rho.  Deterministic: the polynomial offset and
// starting point are derived from n, and retries step the offset.
inline std::uint64_t brent_rho_u64(std::uint64_t n) {
  if (n % 2 == 0) return 2;
  for (std::uint64_t attempt = 0;; ++attempt) {
    const std::uint64_t c = 1 + splitmix64(n + attempt) % (n - 1);
    std::uint64_t y = 2 + splitmix64(~n + attempt) % (n - 3);
    std::uint64_t g = 1, r = 1, q = 1, x = 0, ys = 0;
    const std::uint64_t m = 128;
    while (g == 1) {
      x = y;
      for (std::uint64_t i = 0; i < r; ++i) y = (mulmod_u64(y, y, n) + c) % n;
      std::uint64_t k = 0;
      while (k < r && g == 1) {
        ys = y;
        const std::uint64_t lim = std::min(m, r - k);
        for (std::uint64_t i = 0; i < lim; ++i) {
          y = (mulmod_u64(y, y, n) + c) % n;
          q = mulmod_u64(q, x > y ? x - y : y - x, n);
        }
        g = std::gcd(q, n);
        k += m;
      }
      r <<= 1;
    }
    if (g == n) {
      g = 1;
      do {
        ys = (mulmod_u64(ys, ys, n) + c) % n;
        g = std::gcd(x > ys ? x - ys : ys - x, n);
      } while (g == 1);
    }
    if (g != n) return g;
  }
}

inline Natural brent_rho_big(const Natural& n) {
  if ((n & 1) == 0) return 2;
  for (std::uint64_t attempt = 0;; ++attempt) {
    const Natural c = 1 + splitmix64(static_cast<std::uint64_t>(n & UINT64_MAX) + attempt);
    Natural y = 2 + splitmix64(static_cast<std::uint64_t>((n >> 3) & UINT64_MAX) + attempt);
    Natural g = 1, q = 1, x = 0, ys = 0;
    std::uint64_t r = 1;
    const std::uint64_t m = 128;
    while (g == 1) {
      x = y;
      for (std::uint64_t i = 0; i < r; ++i) y = (y * y + c) % n;
      std::uint64_t k = 0;
      while (k < r && g == 1) {
        ys = y;
        const std::uint64_t lim = std::min(m, r - k);
        for (std::uint64_t i = 0; i < lim; ++i) {
          y = (y * y + c) % n;
          q = (q * (x > y ? x - y : y - x)) % n;
        }
        g = gcd(q, n);
        k += m;
      }
      r <<= 1;
    }
    if (g == n) {
      g = 1;
      do {
        ys = (ys * ys + c) % n;
        g = gcd(x > ys ? x - ys : ys - x, n);
      } while (g == 1);
    }
    if (g != n) return g;
  }
}

inline constexpr std::uint64_t kTrialBound = 32768;

}  // namespace detail

// Deterministic for all n below 3.3e24 (12-base Miller-Rabin); the same
// bases are applied above that width.
inline bool is_prime(const Natural& n) {
  if (n < 2) return false;
  if (n <= UINT64_MAX) return detail::miller_rabin_u64(static_cast<std::uint64_t>(n));
  return detail::miller_rabin_big(n);
}

inline Factorization factorize(const Natural& n_in) {
  if (n_in < 1) throw std::invalid_argument("factorize: n must be >= 1");
  std::map<Natural, unsigned> acc;
  Natural n = n_in;
  for (std::uint64_t d = 2; d <= detail::kTrialBound && Natural(d) * d <= n; d == 2 ? d = 3 : d += 2) {
    while (n % d == 0) {
      ++acc[Natural(d)];
      n /= d;
    }
  }
  // Split the remaining rough cofactor recursively.
  std::vector<Natural> stack;
  if (n > 1) stack.push_back(n);
  while (!stack.empty()) {
    Natural m = stack.back();
    stack.pop_back();
    if (is_prime(m)) {
      ++acc[m];
      continue;
    }
    Natural f = m <= UINT64_MAX
                    ? Natural(detail::brent_rho_u64(static_cast<std::uint64_t>(m)))
                    : detail::brent_rho_big(m);
    stack.push_back(f);
    stack.push_back(m / f);
  }
  Factorization result;
  result.factors.assign(acc.begin(), acc.end());
  return result;
}

inline bool is_squarefree(const Natural& n) {
  if (n < 1) throw std::invalid_argument("is_squarefree: n must be >= 1");
  return factorize(n).squarefree();
}

}  // namespace ecf
