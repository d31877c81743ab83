#include <catch2/catch_amalgamated.hpp>

#include <cstdint>
#include <stdexcept>

#include <ecf/oracle.hpp>

using ecf::MultEllSimulator;
using ecf::MultiplierPolicy;
using ecf::Natural;
using ecf::OracleConfig;

TEST_CASE("unit-multiplier answers are exact group orders") {
  MultEllSimulator sim(OracleConfig{});
  const auto a = sim.query(Natural(33), Natural(1));
  REQUIRE(!a.refused);
  CHECK(a.value == 48);
  const auto b = sim.query(Natural(33), Natural(2));
  CHECK(b.value == 48);
  CHECK(sim.ledger().queries.load() == 2);
  CHECK(sim.ledger().refusals.load() == 0);
}

TEST_CASE("non-square-free targets are refused") {
  MultEllSimulator sim(OracleConfig{});
  const auto a = sim.query(Natural(45), Natural(2));
  CHECK(a.refused);
  CHECK(sim.ledger().queries.load() == 1);
  CHECK(sim.ledger().refusals.load() == 1);
  CHECK(sim.query_tilde(Natural(45), Natural(4)).refused);
  CHECK(sim.ledger().refusals.load() == 2);
}

TEST_CASE("aggregate queries multiply the orders over the coprime range") {
  MultEllSimulator sim(OracleConfig{});
  CHECK(sim.query_tilde(Natural(33), Natural(1)).value == 48);
  CHECK(sim.query_tilde(Natural(33), Natural(2)).value == 2304);
  CHECK(sim.query_tilde(Natural(33), Natural(3)).value == 2304);  // b = 3 skipped
}

TEST_CASE("query argument validation") {
  MultEllSimulator sim(OracleConfig{});
  CHECK_THROWS_AS(sim.query(Natural(10), Natural(3)), std::invalid_argument);
  CHECK_THROWS_AS(sim.query(Natural(1), Natural(1)), std::invalid_argument);
  CHECK_THROWS_AS(sim.query(Natural(33), Natural(0)), std::invalid_argument);
  CHECK_THROWS_AS(sim.query(Natural(33), Natural(3)), std::invalid_argument);
  CHECK_THROWS_AS(sim.query_tilde(Natural(33), Natural(0)), std::invalid_argument);
  CHECK_THROWS_AS(MultEllSimulator(OracleConfig{MultiplierPolicy::AlwaysOne, 0, Natural(-1)}),
                  std::invalid_argument);
}

TEST_CASE("exact_count bypasses multipliers and the ledger") {
  OracleConfig cfg;
  cfg.policy = MultiplierPolicy::SeededPseudorandom;
  cfg.seed = 99;
  MultEllSimulator sim(cfg);
  const auto c = sim.exact_count(Natural(33), Natural(5));
  REQUIRE(c.has_value());
  CHECK(*c == 48);
  CHECK(!sim.exact_count(Natural(45), Natural(2)).has_value());
  CHECK(sim.ledger().queries.load() == 0);
}

TEST_CASE("seeded multipliers are hidden multiples in range") {
  OracleConfig cfg;
  cfg.policy = MultiplierPolicy::SeededPseudorandom;
  cfg.seed = 1234;
  MultEllSimulator sim(cfg);
  for (const std::uint64_t b : {1ULL, 2ULL, 4ULL, 5ULL}) {
    const auto a = sim.query(Natural(33), Natural(b));
    REQUIRE(!a.refused);
    REQUIRE(a.value % 48 == 0);
    const Natural k = a.value / 48;
    CHECK(k >= 1);
    CHECK(k <= 16);
  }
  const auto t = sim.query_tilde(Natural(33), Natural(2));
  REQUIRE(t.value % 2304 == 0);
  CHECK(t.value / 2304 <= 16);
}

TEST_CASE("answers depend only on the target, never on query order") {
  OracleConfig cfg;
  cfg.policy = MultiplierPolicy::SeededPseudorandom;
  cfg.seed = 7;
  MultEllSimulator first(cfg);
  MultEllSimulator second(cfg);
  const auto a1 = first.query(Natural(33), Natural(2));
  const auto a2 = first.query(Natural(33), Natural(5));
  const auto b2 = second.query(Natural(33), Natural(5));
  const auto b1 = second.query(Natural(33), Natural(2));
  CHECK(a1.value == b1.value);
  CHECK(a2.value == b2.value);
  CHECK(first.query_tilde(Natural(33), Natural(2)).value ==
        second.query_tilde(Natural(33), Natural(2)).value);
}

TEST_CASE("different seeds eventually give different multipliers") {
  bool saw_difference = false;
  Natural base;
  {
    MultEllSimulator sim(OracleConfig{MultiplierPolicy::SeededPseudorandom, 0, Natural(0)});
    base = sim.query(Natural(33), Natural(2)).value;
  }
  for (std::uint64_t seed = 1; seed < 64 && !saw_difference; ++seed) {
    MultEllSimulator sim(OracleConfig{MultiplierPolicy::SeededPseudorandom, seed, Natural(0)});
    saw_difference = sim.query(Natural(33), Natural(2)).value != base;
  }
  CHECK(saw_difference);
}

TEST_CASE("the bound clamps oversized answers back to the exact order") {
  // find a seed whose hidden multiplier exceeds 1 for this target
  std::uint64_t seed = 0;
  for (;; ++seed) {
    MultEllSimulator probe(OracleConfig{MultiplierPolicy::SeededPseudorandom, seed, Natural(0)});
    if (probe.query(Natural(33), Natural(5)).value > 48) break;
    REQUIRE(seed < 1000);
  }
  MultEllSimulator clamped(
      OracleConfig{MultiplierPolicy::SeededPseudorandom, seed, Natural(50)});
  CHECK(clamped.query(Natural(33), Natural(5)).value == 48);
}

TEST_CASE("a shared ledger accumulates across simulators") {
  ecf::QueryLedger ledger;
  MultEllSimulator a(OracleConfig{}, &ledger);
  MultEllSimulator b(OracleConfig{}, &ledger);
  a.query(Natural(33), Natural(1));
  b.query(Natural(33), Natural(2));
  b.query(Natural(45), Natural(2));
  CHECK(ledger.queries.load() == 3);
  CHECK(ledger.refusals.load() == 1);
}
