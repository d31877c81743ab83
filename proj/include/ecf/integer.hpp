#pragma once

// Elementary integer routines shared by the whole library: gcd, Jacobi
// symbols, 2-adic valuation, bounded trial division, modular inversion with
// a zero-divisor witness, and the least non-residue search.  Everything is
// exact arithmetic over arbitrary-precision integers.

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <utility>

namespace ecf {

// Nonnegative arbitrary-precision integer.  Negativity is a contract
// violation everywhere a Natural is expected.
using Natural = boost::multiprecision::cpp_int;

inline Natural gcd(const Natural& a, const Natural& b) {
  return boost::multiprecision::gcd(a, b);
}

inline Natural powmod(const Natural& base, const Natural& exp, const Natural& mod) {
  if (mod <= 0) throw std::invalid_argument("powmod: modulus must be positive");
  if (mod == 1) return 0;
  return boost::multiprecision::powm(base % mod, exp, mod);
}

// 2-adic valuation of k >= 1.
inline unsigned nu2(const Natural& k) {
  if (k <= 0) throw std::invalid_argument("nu2: argument must be >= 1");
  return boost::multiprecision::lsb(k);
}

// Jacobi symbol (a/n) for odd n >= 1.  Computed by the binary reduction with
// the reciprocity twists; no factorization of n involved.
inline int jacobi(const Natural& a_in, const Natural& n_in) {
  if (n_in <= 0 || (n_in & 1) == 0)
    throw std::invalid_argument("jacobi: lower argument must be odd and positive");
  Natural a = a_in % n_in;
  if (a < 0) a += n_in;
  Natural n = n_in;
  if (n == 1) return 1;
  int result = 1;
  while (a != 0) {
    while ((a & 1) == 0) {
      a >>= 1;
      const unsigned r = static_cast<unsigned>(n & 7);
      if (r == 3 || r == 5) result = -result;
    }
    a.swap(n);
    if ((a & 3) == 3 && (n & 3) == 3) result = -result;
    a %= n;
  }
  return n == 1 ? result : 0;
}

// Smallest prime p <= z dividing n, if any.  The scan returns the first
// divisor found, which is automatically prime; n itself is returned when n
// is prime and n <= z.
inline std::optional<Natural> trial_division(const Natural& n, const Natural& z) {
  if (n < 2) throw std::invalid_argument("trial_division: n must be >= 2");
  if (z < 2) return std::nullopt;
  if (n <= UINT64_MAX) {
    const std::uint64_t nv = static_cast<std::uint64_t>(n);
    const std::uint64_t zv = z > UINT64_MAX ? UINT64_MAX : static_cast<std::uint64_t>(z);
    if (nv % 2 == 0) return Natural(2);
    for (std::uint64_t d = 3; d <= zv; d += 2) {
      if (d > nv / d) return nv <= zv ? std::optional<Natural>(Natural(nv)) : std::nullopt;
      if (nv % d == 0) return Natural(d);
    }
    return std::nullopt;
  }
  if ((n & 1) == 0) return Natural(2);
  for (Natural d = 3; d <= z; d += 2) {
    if (d * d > n) return n <= z ? std::optional<Natural>(n) : std::nullopt;
    if (n % d == 0) return d;
  }
  return std::nullopt;
}

// Outcome of attempting to invert d modulo n.  SplitFactor carries a proper
// divisor of n; Annihilated occurs exactly for d = 0 (gcd(0, n) = n).
struct InverseOutcome {
  enum class Kind { Unit, SplitFactor, Annihilated };
  Kind kind{Kind::Annihilated};
  Natural value;  // the inverse when Unit, the divisor when SplitFactor

  static InverseOutcome unit(Natural inv) {
    return {Kind::Unit, std::move(inv)};
  }
  static InverseOutcome split(Natural divisor) {
    return {Kind::SplitFactor, std::move(divisor)};
  }
  static InverseOutcome annihilated() { return {Kind::Annihilated, Natural(0)}; }
};

namespace detail {

// Extended Euclid; requires gcd(d, n) = 1, 0 < d < n.
inline Natural modular_inverse(const Natural& d, const Natural& n) {
  Natural old_r = d, r = n;
  Natural old_s = 1, s = 0;
  while (r != 0) {
    const Natural q = old_r / r;
    Natural t = old_r - q * r;
    old_r = std::move(r);
    r = std::move(t);
    t = old_s - q * s;
    old_s = std::move(s);
    s = std::move(t);
  }
  Natural inv = old_s % n;
  if (inv < 0) inv += n;
  return inv;
}

}  // namespace detail

inline InverseOutcome inverse_with_witness(const Natural& d_in, const Natural& n) {
  if (n < 2) throw std::invalid_argument("inverse_with_witness: modulus must be >= 2");
  Natural d = d_in % n;
  if (d < 0) d += n;
  if (d == 0) return InverseOutcome::annihilated();
  Natural g = gcd(d, n);
  if (g == 1) return InverseOutcome::unit(detail::modular_inverse(d, n));
  return InverseOutcome::split(std::move(g));
}

// Least b >= 2 with gcd(b, n) = 1 and (b/n) = -1.  Exists for every odd
// square-free n > 1; for other odd n the search may exhaust and throws.
inline Natural smallest_nonresidue(const Natural& n) {
  if (n <= 1 || (n & 1) == 0)
    throw std::invalid_argument("smallest_nonresidue: n must be odd and > 1");
  for (Natural b = 2; b <= n; ++b) {
    if (gcd(b, n) != 1) continue;
    if (jacobi(b, n) == -1) return b;
  }
  throw std::runtime_error("smallest_nonresidue: exhausted candidates (n not square-free?)");
}

}  // namespace ecf
