#pragma once

// Simulated oracle for curve group orders over Z_n.
//
// A query names a target n and a curve parameter b.  When n is odd and
// square-free the answer is k * #E_b(Z_n) for a hidden positive integer k,
// subject to k * #E_b(Z_n) <= M for the configured bound M; when n is not
// square-free the oracle refuses (the answer carries no value).  The
// aggregate form answers k * F(n, B) where F is the product of the group
// orders over all curve parameters 1 <= b <= B coprime to n.
//
// The hidden multiplier is a pure function of (n, b, config), never of
// query order, so concurrent and resumed runs see identical answers.

#include "ecf/factorize.hpp"
#include "ecf/integer.hpp"
#include "ecf/point_count.hpp"

#include <atomic>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>

namespace ecf {

enum class MultiplierPolicy {
  AlwaysOne,           // k = 1 for every answered query
  SeededPseudorandom,  // k in [1, 16] derived from (seed, n, b)
};

struct OracleConfig {
  MultiplierPolicy policy{MultiplierPolicy::AlwaysOne};
  std::uint64_t seed{0};
  Natural bound{0};  // M; 0 means no clamping bound
};

struct OracleAnswer {
  bool refused{false};
  Natural value{0};

  static OracleAnswer refusal() { return OracleAnswer{true, 0}; }
  static OracleAnswer of(Natural v) { return OracleAnswer{false, std::move(v)}; }
};

// Shared counters; safe to hand one ledger to many simulators.
struct QueryLedger {
  std::atomic<std::uint64_t> queries{0};
  std::atomic<std::uint64_t> refusals{0};
};

namespace detail {

inline std::uint64_t fnv1a_decimal(const Natural& v, std::uint64_t h) {
  const std::string s = v.str();
  for (const char ch : s) {
    h ^= static_cast<unsigned char>(ch);
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace detail

// Answers group-order queries from its own factorizations and point counts.
// Not thread-safe; give each worker its own instance (the caches are
// per-instance, the ledger may be shared).
class MultEllSimulator {
 public:
  explicit MultEllSimulator(OracleConfig cfg, QueryLedger* ledger = nullptr)
      : cfg_(std::move(cfg)), ledger_(ledger ? ledger : &own_ledger_) {
    if (cfg_.bound < 0) throw std::invalid_argument("MultEllSimulator: bound must be >= 0");
  }

  const OracleConfig& config() const { return cfg_; }
  QueryLedger& ledger() { return *ledger_; }

  // k * #E_b(Z_n), or a refusal when n is not square-free.
  OracleAnswer query(const Natural& n, const Natural& b) {
    check_target(n);
    if (b < 1 || gcd(b, n) != 1)
      throw std::invalid_argument("oracle query: b must be a positive unit mod n");
    ledger_->queries.fetch_add(1, std::memory_order_relaxed);
    const Factorization& f = factored(n);
    if (!f.squarefree()) {
      ledger_->refusals.fetch_add(1, std::memory_order_relaxed);
      return OracleAnswer::refusal();
    }
    return answer_with_multiplier(order_product(f, b), n, b);
  }

  // k * F(n, B), or a refusal when n is not square-free.
  OracleAnswer query_tilde(const Natural& n, const Natural& B) {
    check_target(n);
    if (B < 1) throw std::invalid_argument("oracle query: B must be >= 1");
    ledger_->queries.fetch_add(1, std::memory_order_relaxed);
    const Factorization& f = factored(n);
    if (!f.squarefree()) {
      ledger_->refusals.fetch_add(1, std::memory_order_relaxed);
      return OracleAnswer::refusal();
    }
    Natural product = 1;
    for (Natural b = 1; b <= B; ++b) {
      if (gcd(b, n) != 1) continue;
      product *= order_product(f, b);
    }
    return answer_with_multiplier(std::move(product), n, Natural(0));
  }

  // Exact #E_b(Z_n) with no hidden multiplier and no ledger traffic; empty
  // when the oracle would refuse.  Used by diagnostic output.
  std::optional<Natural> exact_count(const Natural& n, const Natural& b) {
    check_target(n);
    if (b < 1 || gcd(b, n) != 1)
      throw std::invalid_argument("oracle query: b must be a positive unit mod n");
    const Factorization& f = factored(n);
    if (!f.squarefree()) return std::nullopt;
    return order_product(f, b);
  }

 private:
  static void check_target(const Natural& n) {
    if (n < 3 || (n & 1) == 0)
      throw std::invalid_argument("oracle query: n must be odd and >= 3");
  }

  const Factorization& factored(const Natural& n) {
    auto it = factor_cache_.find(n);
    if (it == factor_cache_.end()) it = factor_cache_.emplace(n, factorize(n)).first;
    return it->second;
  }

  Natural order_product(const Factorization& f, const Natural& b) {
    Natural result = 1;
    for (const auto& [p, e] : f.factors) result *= local_count(p, b);
    return result;
  }

  Natural local_count(const Natural& p, const Natural& b) {
    if (p > (Natural(1) << 62)) return count_points(p, b);  // beyond the cache key width
    const std::uint64_t pv = static_cast<std::uint64_t>(p);
    Natural bm = b % p;
    if (bm < 0) bm += p;
    const std::uint64_t bv = static_cast<std::uint64_t>(bm);
    const std::pair<std::uint64_t, unsigned> key{pv, quartic_class_key(pv, bv)};
    auto it = count_cache_.find(key);
    if (it == count_cache_.end())
      it = count_cache_.emplace(key, count_points(p, b)).first;
    return it->second;
  }

  OracleAnswer answer_with_multiplier(Natural count, const Natural& n, const Natural& b) {
    Natural k = 1;
    if (cfg_.policy == MultiplierPolicy::SeededPseudorandom) {
      std::uint64_t h = detail::fnv1a_decimal(n, 14695981039346656037ULL);
      h = detail::fnv1a_decimal(b, h ^ 0x9e3779b97f4a7c15ULL);
      k = 1 + detail::splitmix64(cfg_.seed ^ h) % 16;
    }
    Natural value = k * count;
    if (cfg_.bound > 0 && value > cfg_.bound) value = std::move(count);
    return OracleAnswer::of(std::move(value));
  }

  OracleConfig cfg_;
  QueryLedger own_ledger_;
  QueryLedger* ledger_;
  std::map<Natural, Factorization> factor_cache_;
  std::map<std::pair<std::uint64_t, unsigned>, Natural> count_cache_;
};

}  // namespace ecf
