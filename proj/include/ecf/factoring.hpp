#pragma once

// Oracle-assisted factoring sweeps.
//
// Both variants share the same skeleton: strip small primes by trial
// division up to z, then sweep curve parameters b = 2..B; for each b build
// the deterministic start point from start_point and multiply it by an
// oracle-supplied multiple of the curve group order.  Every failure of the
// partial group law along the way surrenders a proper divisor.
//
//   PerCurve:  one oracle query per swept b (the answer is a multiple of
//              #E_b(Z_n) for that b).
//   Aggregate: a single oracle query whose answer is a multiple of the
//              product F(n, B) over all coprime b <= B; the same scalar is
//              reused for every swept b.
//
// Parameter derivation: with L = ln N, the PerCurve shape uses B = L^gamma
// and z = L^beta with beta = (gamma - 1) / (8 (gamma - 2)), valid for
// 2 < gamma < (17 + sqrt(257)) / 16; the Aggregate shape uses z = B = c L.

#include "ecf/curve.hpp"
#include "ecf/factorize.hpp"
#include "ecf/integer.hpp"
#include "ecf/oracle.hpp"

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>

namespace ecf {

enum class Variant {
  PerCurve,   // one group-order query per curve parameter
  Aggregate,  // one aggregated query for the whole sweep
};

struct AlgoParams {
  Natural N;  // declared upper bound on inputs; also sizes the oracle bound
  std::uint64_t z{0};
  std::uint64_t B{0};
  Variant variant{Variant::PerCurve};
};

namespace detail {

inline long double ln_natural(const Natural& v) {
  if (v <= 0) throw std::invalid_argument("ln_natural: argument must be positive");
  if (v <= UINT64_MAX)
    return std::log(static_cast<long double>(static_cast<std::uint64_t>(v)));
  const unsigned bits = boost::multiprecision::msb(v);
  const unsigned shift = bits - 63;
  const std::uint64_t top = static_cast<std::uint64_t>(v >> shift);
  return std::log(static_cast<long double>(top)) + shift * 0.6931471805599453L;
}

inline std::uint64_t floor_clamped(long double v) {
  constexpr long double kMax = 1e18L;
  if (!(v >= 0)) return 0;
  if (v >= kMax) return static_cast<std::uint64_t>(kMax);
  return static_cast<std::uint64_t>(v);
}

}  // namespace detail

// Largest admissible gamma: (17 + sqrt(257)) / 16.
inline long double gamma_upper_bound() {
  return (17.0L + std::sqrt(257.0L)) / 16.0L;
}

// PerCurve shape from the bound N and exponent gamma.
inline AlgoParams derive_params(const Natural& N, long double gamma) {
  if (N < 16) throw std::invalid_argument("derive_params: N must be >= 16");
  if (!(gamma > 2.0L) || !(gamma < gamma_upper_bound()))
    throw std::invalid_argument(
        "derive_params: gamma must satisfy 2 < gamma < (17 + sqrt(257)) / 16");
  const long double l = detail::ln_natural(N);
  const long double beta = (gamma - 1.0L) / (8.0L * (gamma - 2.0L));
  AlgoParams p;
  p.N = N;
  p.z = detail::floor_clamped(std::pow(l, beta));
  p.B = detail::floor_clamped(std::pow(l, gamma));
  p.variant = Variant::PerCurve;
  return p;
}

// Aggregate shape from the bound N and slope c: z = B = floor(c ln N),
// raised to 2 when the product would be degenerate.
inline AlgoParams derive_params_tilde(const Natural& N, long double c) {
  if (N < 16) throw std::invalid_argument("derive_params_tilde: N must be >= 16");
  if (!(c > 0.0L)) throw std::invalid_argument("derive_params_tilde: c must be positive");
  const std::uint64_t zb =
      std::max<std::uint64_t>(2, detail::floor_clamped(c * detail::ln_natural(N)));
  AlgoParams p;
  p.N = N;
  p.z = zb;
  p.B = zb;
  p.variant = Variant::Aggregate;
  return p;
}

// Default oracle bounds matching the two query shapes.
inline Natural default_oracle_bound(const Natural& N) {
  return boost::multiprecision::pow(N, 8);
}

inline Natural default_oracle_bound_aggregate(const Natural& N, std::uint64_t B) {
  if (B > 4096) throw std::invalid_argument("aggregate oracle bound: B too large for N^(8B)");
  return boost::multiprecision::pow(N, static_cast<unsigned>(8 * B));
}

enum class FailReason {
  None,
  NoFactorFound,  // the sweep completed without a group-law failure
  NotSquareFree,  // the oracle refused every useful answer
};

struct FactorOutcome {
  enum class Kind { Factored, InputIsPrime, Exceptional, Invalid };

  Kind kind{Kind::Invalid};
  std::optional<FactorWitness> witness;
  FailReason reason{FailReason::None};
  std::string message;

  static FactorOutcome factored(FactorWitness w) {
    FactorOutcome o;
    o.kind = Kind::Factored;
    o.witness = std::move(w);
    return o;
  }
  static FactorOutcome input_is_prime() {
    FactorOutcome o;
    o.kind = Kind::InputIsPrime;
    return o;
  }
  static FactorOutcome exceptional(FailReason r) {
    FactorOutcome o;
    o.kind = Kind::Exceptional;
    o.reason = r;
    return o;
  }
  static FactorOutcome invalid(std::string msg) {
    FactorOutcome o;
    o.kind = Kind::Invalid;
    o.message = std::move(msg);
    return o;
  }
};

namespace detail {

// Shared preamble: parity and small primes.  Returns an outcome when the
// input is settled before any curve work, otherwise nothing.
inline std::optional<FactorOutcome> settle_before_curves(const Natural& n,
                                                         std::uint64_t z) {
  if (n < 2) return FactorOutcome::invalid("n must be >= 2");
  if ((n & 1) == 0) {
    if (n > 2) return FactorOutcome::factored(FactorWitness(2, n, WitnessSource::TrialDivision));
    return FactorOutcome::exceptional(FailReason::NoFactorFound);
  }
  if (const auto p = trial_division(n, z); p && *p < n)
    return FactorOutcome::factored(FactorWitness(*p, n, WitnessSource::TrialDivision));
  return std::nullopt;
}

// gcd(b, n) screen for one sweep position: a proper divisor settles the
// run, gcd = n means b carries no information and the position is skipped.
inline std::optional<FactorOutcome> screen_b(const Natural& n, std::uint64_t b,
                                             bool& skip) {
  const Natural g = gcd(Natural(b), n);
  skip = (g == n);
  if (g == 1 || skip) return std::nullopt;
  FactorWitness w(g, n, WitnessSource::TrialDivision);
  w.b_used = b;
  return FactorOutcome::factored(std::move(w));
}

// Multiply the prepared start point by the order multiple m; any group-law
// failure is a factor.
inline std::optional<FactorOutcome> multiply_out(const Natural& n, std::uint64_t b,
                                                 const Natural& m, const StartPoint& sp) {
  const CurveParams c = curve(n, sp.curve_b);
  StepOutcome step = scalar_mul(m, sp.point, c);
  if (step.kind != StepOutcome::Kind::Factor) return std::nullopt;
  step.witness->b_used = b;
  step.witness->scalar = m;
  return FactorOutcome::factored(std::move(*step.witness));
}

}  // namespace detail

// PerCurve sweep: query the group order separately for every b.
template <typename Oracle>
FactorOutcome algorithm_a(const Natural& n, const AlgoParams& params, Oracle& oracle) {
  if (auto settled = detail::settle_before_curves(n, params.z)) return *settled;
  for (std::uint64_t b = 2; b <= params.B; ++b) {
    bool skip = false;
    if (auto hit = detail::screen_b(n, b, skip)) return *hit;
    if (skip) continue;
    StartPointResult probe = start_point(b, n);
    if (probe.kind == StartPointResult::Kind::Skip) continue;
    if (probe.kind == StartPointResult::Kind::Factor)
      return FactorOutcome::factored(std::move(*probe.witness));
    const OracleAnswer ans = oracle.query(n, Natural(b));
    if (ans.refused) return FactorOutcome::exceptional(FailReason::NotSquareFree);
    if (auto hit = detail::multiply_out(n, b, ans.value, *probe.value)) return *hit;
  }
  return FactorOutcome::exceptional(FailReason::NoFactorFound);
}

// Aggregate sweep: one query, shared scalar across the whole b range.
template <typename Oracle>
FactorOutcome algorithm_tilde(const Natural& n, const AlgoParams& params, Oracle& oracle) {
  if (auto settled = detail::settle_before_curves(n, params.z)) return *settled;
  const OracleAnswer ans = oracle.query_tilde(n, Natural(params.B));
  if (ans.refused) return FactorOutcome::exceptional(FailReason::NotSquareFree);
  for (std::uint64_t b = 2; b <= params.B; ++b) {
    bool skip = false;
    if (auto hit = detail::screen_b(n, b, skip)) return *hit;
    if (skip) continue;
    StartPointResult probe = start_point(b, n);
    if (probe.kind == StartPointResult::Kind::Skip) continue;
    if (probe.kind == StartPointResult::Kind::Factor)
      return FactorOutcome::factored(std::move(*probe.witness));
    if (auto hit = detail::multiply_out(n, b, ans.value, *probe.value)) return *hit;
  }
  return FactorOutcome::exceptional(FailReason::NoFactorFound);
}

// Entry point used by the tools: range checks, primality short-circuit,
// then the configured sweep.
template <typename Oracle>
FactorOutcome factor_pipeline(const Natural& n, const AlgoParams& params, Oracle& oracle) {
  if (n < 2) return FactorOutcome::invalid("n must be >= 2");
  if (params.N >= 2 && n > params.N)
    return FactorOutcome::invalid("n exceeds the declared bound N");
  if (is_prime(n)) return FactorOutcome::input_is_prime();
  if (params.variant == Variant::Aggregate) return algorithm_tilde(n, params, oracle);
  return algorithm_a(n, params, oracle);
}

}  // namespace ecf
