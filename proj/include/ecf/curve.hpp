#pragma once

// Arithmetic on the curve family  E_b : y^2 = x(x^2 - b)  over Z_n for odd
// composite (or prime) n.  The chord-tangent formulas need a modular
// inverse, and over a ring that inverse can fail two ways: the denominator
// shares a proper factor with n (the useful failure: a divisor of n falls
// out), or it vanishes modulo every prime at once.  Every operation reports
// which of the three cases occurred instead of hiding the failure.
//
// Points are Infinity or Affine only.  The excluded projective case (z a
// zero divisor) cannot be represented; whenever an addition would produce
// it, the y-coordinates already split n and the operation returns that
// divisor instead.

#include "ecf/integer.hpp"

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

namespace ecf {

struct CurveParams {
  Natural n;  // odd modulus >= 3
  Natural b;  // curve coefficient, gcd(b, n) = 1
};

// Validating constructor; ops assume a curve built here (or equivalent).
inline CurveParams curve(Natural n, Natural b) {
  if (n < 3 || (n & 1) == 0)
    throw std::invalid_argument("curve: modulus must be odd and >= 3");
  b %= n;
  if (b < 0) b += n;
  if (gcd(b, n) != 1)
    throw std::invalid_argument("curve: coefficient must be a unit mod n");
  return CurveParams{std::move(n), std::move(b)};
}

struct Point {
  bool infinity{true};
  Natural x;
  Natural y;

  static Point at_infinity() { return Point{}; }
  static Point affine(Natural x, Natural y) {
    return Point{false, std::move(x), std::move(y)};
  }
  friend bool operator==(const Point& a, const Point& b) {
    if (a.infinity || b.infinity) return a.infinity == b.infinity;
    return a.x == b.x && a.y == b.y;
  }
};

enum class WitnessSource {
  TrialDivision,
  AlphaGcd,
  DoublingDenominator,
  AdditionDenominator,
  OracleRefusal,
};

inline const char* witness_source_name(WitnessSource s) {
  switch (s) {
    case WitnessSource::TrialDivision: return "trial_division";
    case WitnessSource::AlphaGcd: return "alpha_gcd";
    case WitnessSource::DoublingDenominator: return "doubling_denominator";
    case WitnessSource::AdditionDenominator: return "addition_denominator";
    case WitnessSource::OracleRefusal: return "oracle_refusal";
  }
  return "unknown";
}

struct FactorWitness {
  Natural divisor;
  Natural cofactor;
  WitnessSource source;
  std::optional<Natural> b_used;  // curve index that produced the split
  std::optional<Natural> scalar;  // multiplier in play when the formulas failed

  FactorWitness(Natural d, const Natural& n, WitnessSource src)
      : divisor(std::move(d)), cofactor(n / divisor), source(src) {
    if (divisor <= 1 || divisor >= n || divisor * cofactor != n)
      throw std::logic_error("FactorWitness: divisor must be proper");
  }
};

// Result of one partial group operation.
struct StepOutcome {
  enum class Kind { Ok, Factor, Annihilated };
  Kind kind{Kind::Ok};
  Point point;                           // meaningful when Ok
  std::optional<FactorWitness> witness;  // meaningful when Factor

  static StepOutcome ok(Point p) { return {Kind::Ok, std::move(p), std::nullopt}; }
  static StepOutcome factor(FactorWitness w) {
    return {Kind::Factor, Point::at_infinity(), std::move(w)};
  }
  static StepOutcome annihilated() {
    return {Kind::Annihilated, Point::at_infinity(), std::nullopt};
  }
};

inline bool on_curve(const Point& p, const CurveParams& c) {
  if (p.infinity) return true;
  if (p.x < 0 || p.x >= c.n || p.y < 0 || p.y >= c.n) return false;
  const Natural lhs = (p.y * p.y) % c.n;
  Natural rhs = (p.x * p.x) % c.n;
  rhs = (rhs + c.n - c.b) % c.n;
  rhs = (rhs * p.x) % c.n;
  return lhs == rhs;
}

namespace detail {

inline void require_member(const Point& p, const CurveParams& c, const char* who) {
  if (!on_curve(p, c))
    throw std::invalid_argument(std::string(who) + ": point is not on the curve");
}

inline Natural submod(const Natural& a, const Natural& b, const Natural& n) {
  Natural r = (a + n - b) % n;
  return r;
}

}  // namespace detail

// Tangent step.  Denominator 2*y_P: a unit completes the formula, a proper
// gcd is a divisor of n, gcd = n (i.e. y_P = 0 since n is odd) means 2P = O
// modulo every prime.
inline StepOutcome double_point(const Point& p, const CurveParams& c) {
  detail::require_member(p, c, "double_point");
  if (p.infinity) return StepOutcome::ok(Point::at_infinity());
  const Natural den = (2 * p.y) % c.n;
  InverseOutcome inv = inverse_with_witness(den, c.n);
  switch (inv.kind) {
    case InverseOutcome::Kind::Annihilated:
      return StepOutcome::annihilated();
    case InverseOutcome::Kind::SplitFactor:
      return StepOutcome::factor(
          FactorWitness(std::move(inv.value), c.n, WitnessSource::DoublingDenominator));
    case InverseOutcome::Kind::Unit:
      break;
  }
  // lambda = (3x^2 - b) / (2y);  a = -b in the long Weierstrass view.
  Natural num = (3 * p.x % c.n * p.x) % c.n;
  num = detail::submod(num, c.b, c.n);
  const Natural lambda = (num * inv.value) % c.n;
  Natural xr = (lambda * lambda) % c.n;
  xr = detail::submod(xr, (2 * p.x) % c.n, c.n);
  Natural yr = (lambda * detail::submod(p.x, xr, c.n)) % c.n;
  yr = detail::submod(yr, p.y, c.n);
  return StepOutcome::ok(Point::affine(std::move(xr), std::move(yr)));
}

// Chord step.  The y_P = -y_Q check precedes the equal-point delegation, so
// a 2-torsion point added to itself yields Infinity directly.  Equal
// x-coordinates with y_P != +-y_Q mean P = Q modulo part of n and P = -Q
// modulo the rest; the y-difference then splits n and is returned as the
// witness (the true sum would need the excluded projective representation).
inline StepOutcome add(const Point& p, const Point& q, const CurveParams& c) {
  detail::require_member(p, c, "add");
  detail::require_member(q, c, "add");
  if (p.infinity) return StepOutcome::ok(q);
  if (q.infinity) return StepOutcome::ok(p);
  if (p.x == q.x) {
    if ((p.y + q.y) % c.n == 0) return StepOutcome::ok(Point::at_infinity());
    if (p.y == q.y) return double_point(p, c);
    Natural g = gcd(detail::submod(q.y, p.y, c.n), c.n);
    return StepOutcome::factor(
        FactorWitness(std::move(g), c.n, WitnessSource::AdditionDenominator));
  }
  const Natural den = detail::submod(q.x, p.x, c.n);
  InverseOutcome inv = inverse_with_witness(den, c.n);
  switch (inv.kind) {
    case InverseOutcome::Kind::Annihilated:
      return StepOutcome::annihilated();  // unreachable: den != 0
    case InverseOutcome::Kind::SplitFactor:
      return StepOutcome::factor(
          FactorWitness(std::move(inv.value), c.n, WitnessSource::AdditionDenominator));
    case InverseOutcome::Kind::Unit:
      break;
  }
  const Natural lambda = (detail::submod(q.y, p.y, c.n) * inv.value) % c.n;
  Natural xr = (lambda * lambda) % c.n;
  xr = detail::submod(xr, (p.x + q.x) % c.n, c.n);
  Natural yr = (lambda * detail::submod(p.x, xr, c.n)) % c.n;
  yr = detail::submod(yr, p.y, c.n);
  return StepOutcome::ok(Point::affine(std::move(xr), std::move(yr)));
}

// e*P by left-to-right double-and-add (the binary recursion 2*(e/2 * P) and
// (e-1)*P + P unrolled).  The first Factor from any step is returned
// immediately.  A doubling that annihilates pins the intermediate to O
// modulo every prime simultaneously, so the walk continues from Infinity;
// the remaining steps ride the identity rules.
inline StepOutcome scalar_mul(const Natural& e, const Point& p, const CurveParams& c) {
  if (e < 0) throw std::invalid_argument("scalar_mul: scalar must be >= 0");
  detail::require_member(p, c, "scalar_mul");
  if (e == 0 || p.infinity) return StepOutcome::ok(Point::at_infinity());
  const unsigned top = boost::multiprecision::msb(e);
  Point acc = p;
  for (unsigned i = top; i-- > 0;) {
    StepOutcome d = double_point(acc, c);
    if (d.kind == StepOutcome::Kind::Factor) return d;
    acc = d.kind == StepOutcome::Kind::Annihilated ? Point::at_infinity() : d.point;
    if (boost::multiprecision::bit_test(e, i)) {
      StepOutcome s = add(acc, p, c);
      if (s.kind == StepOutcome::Kind::Factor) return s;
      acc = s.kind == StepOutcome::Kind::Annihilated ? Point::at_infinity() : s.point;
    }
  }
  return StepOutcome::ok(std::move(acc));
}

// Coordinatewise reduction; used to compare ring points with their images
// modulo a prime divisor of n.
inline Point reduce_mod(const Point& p, const Natural& r) {
  if (r < 2) throw std::invalid_argument("reduce_mod: modulus must be >= 2");
  if (p.infinity) return Point::at_infinity();
  return Point::affine(p.x % r, p.y % r);
}

// Sweep start point attached to a candidate b: with alpha = b^2(b - 1)
// mod n, the point (alpha*b, alpha^2) lies on E_{b*alpha^2}.  alpha = 0
// degenerates (Skip); a proper gcd(alpha, n) is already a divisor.
struct StartPoint {
  Natural alpha;
  Point point;
  Natural curve_b;
};

struct StartPointResult {
  enum class Kind { Point, Factor, Skip };
  Kind kind{Kind::Skip};
  std::optional<StartPoint> value;
  std::optional<FactorWitness> witness;

  static StartPointResult point(StartPoint sp) {
    return {Kind::Point, std::move(sp), std::nullopt};
  }
  static StartPointResult factor(FactorWitness w) {
    return {Kind::Factor, std::nullopt, std::move(w)};
  }
  static StartPointResult skip() { return {}; }
};

inline StartPointResult start_point(const Natural& b, const Natural& n) {
  if (n < 3 || (n & 1) == 0)
    throw std::invalid_argument("start_point: n must be odd and >= 3");
  if (b < 1) throw std::invalid_argument("start_point: b must be >= 1");
  if (gcd(b, n) != 1)
    throw std::invalid_argument("start_point: b must be coprime to n");
  const Natural bm = b % n;
  Natural alpha = (bm * bm) % n;
  alpha = (alpha * ((bm + n - 1) % n)) % n;  // b^2 (b - 1)
  if (alpha == 0) return StartPointResult::skip();
  Natural g = gcd(alpha, n);
  if (g > 1) {
    FactorWitness w(std::move(g), n, WitnessSource::AlphaGcd);
    w.b_used = b;
    return StartPointResult::factor(std::move(w));
  }
  const Natural alpha_sq = (alpha * alpha) % n;
  StartPoint sp{alpha, Point::affine((alpha * bm) % n, alpha_sq),
                (bm * alpha_sq) % n};
  return StartPointResult::point(std::move(sp));
}

}  // namespace ecf
