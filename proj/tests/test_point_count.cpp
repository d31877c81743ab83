#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <cstdint>
#include <numeric>
#include <set>
#include <stdexcept>
#include <utility>
#include <vector>

#include <ecf/point_count.hpp>

#include "test_support.hpp"

using ecf::Natural;
using ecf::Point;

namespace {

// Image of the doubling map on y^2 = (x - r0)(x - r1)(x - r2) over F_p,
// computed from the tangent formula on the general cubic.
std::set<std::pair<std::uint64_t, std::uint64_t>> doubling_image(
    std::uint64_t p, std::uint64_t r0, std::uint64_t r1, std::uint64_t r2) {
  const std::uint64_t c2 = (3 * p - r0 - r1 - r2) % p;
  const std::uint64_t c1 =
      (ref::mulmod(r0, r1, p) + ref::mulmod(r0, r2, p) + ref::mulmod(r1, r2, p)) % p;
  const std::uint64_t c0 = (p - ref::mulmod(ref::mulmod(r0, r1, p), r2, p) % p) % p;
  std::set<std::pair<std::uint64_t, std::uint64_t>> image;
  for (std::uint64_t x = 0; x < p; ++x) {
    const std::uint64_t rhs =
        (ref::mulmod((ref::mulmod(x + c2, x, p) + c1) % p, x, p) + c0) % p;
    for (std::uint64_t y = 1; y < p; ++y) {
      if (ref::mulmod(y, y, p) != rhs) continue;
      const std::uint64_t num =
          (ref::mulmod(3 * x % p, x, p) + ref::mulmod(2 * c2 % p, x, p) + c1) % p;
      const std::uint64_t lambda =
          ref::mulmod(num, ref::powmod(2 * y % p, p - 2, p), p);
      const std::uint64_t xr =
          (ref::mulmod(lambda, lambda, p) + 3 * p - c2 - 2 * x % p) % p;
      const std::uint64_t yr =
          (ref::mulmod(lambda, (x + p - xr) % p, p) + p - y) % p;
      image.emplace(xr, yr);
    }
  }
  return image;
}

}  // namespace

TEST_CASE("count_points fixed values") {
  CHECK(ecf::count_points(Natural(7), Natural(1)) == 8);
  CHECK(ecf::count_points(Natural(5), Natural(2)) == 10);
  CHECK(ecf::count_points(Natural(11), Natural(5)) == 12);
  CHECK(ecf::count_points(Natural(3), Natural(1)) == 4);
  CHECK(ecf::count_points(Natural(3), Natural(2)) == 4);
}

TEST_CASE("count_points argument validation") {
  CHECK_THROWS_AS(ecf::count_points(Natural(2), Natural(1)), std::invalid_argument);
  CHECK_THROWS_AS(ecf::count_points(Natural(9), Natural(1)), std::invalid_argument);
  CHECK_THROWS_AS(ecf::count_points(Natural(15), Natural(2)), std::invalid_argument);
  CHECK_THROWS_AS(ecf::count_points(Natural(7), Natural(0)), std::invalid_argument);
  CHECK_THROWS_AS(ecf::count_points(Natural(7), Natural(14)), std::invalid_argument);
}

TEST_CASE("count_points equals one plus the affine solution count") {
  for (std::uint64_t p = 3; p < 60; ++p) {
    if (!ref::prime_trial(p)) continue;
    for (std::uint64_t b = 1; b < p; ++b)
      CHECK(ecf::count_points(Natural(p), Natural(b)) == ref::affine_count(p, b) + 1);
  }
}

TEST_CASE("residue class three mod four always gives p plus one") {
  for (std::uint64_t p = 3; p < 3000; ++p) {
    if (!ref::prime_trial(p) || (p & 3) != 3) continue;
    const std::uint64_t b = 1 + ref::mix(p) % (p - 1);
    CHECK(ecf::count_points(Natural(p), Natural(b)) == p + 1);
  }
}

TEST_CASE("large-prime counting agrees with the character sum") {
  // primes just above the exhaustive dispatch limit exercise the fast path
  std::vector<std::uint64_t> primes;
  for (std::uint64_t p = 100001; primes.size() < 12; p += 2)
    if ((p & 3) == 1 && ref::prime_trial(p)) primes.push_back(p);
  for (const std::uint64_t p : primes)
    for (const std::uint64_t b : std::array<std::uint64_t, 4>{2, 3, 5, p - 3}) {
      const Natural fast = ecf::count_points(Natural(p), Natural(b));
      const Natural slow = ecf::count_points_exhaustive(Natural(p), Natural(b));
      CHECK(fast == slow);
    }
}

TEST_CASE("count depends on b only through its quartic class") {
  for (const std::uint64_t p : {13ULL, 17ULL, 29ULL, 37ULL, 41ULL}) {
    for (std::uint64_t b = 1; b < p; ++b)
      for (std::uint64_t c = 1; c < p; ++c) {
        const std::uint64_t b2 = ref::mulmod(b, ref::powmod(c, 4, p), p);
        CHECK(ecf::count_points(Natural(p), Natural(b)) ==
              ecf::count_points(Natural(p), Natural(b2)));
        CHECK(ecf::quartic_class_key(p, b) == ecf::quartic_class_key(p, b2));
      }
  }
}

TEST_CASE("two_torsion_count fixed values and brute force") {
  CHECK(ecf::two_torsion_count(Natural(7), Natural(1)) == 4);
  CHECK(ecf::two_torsion_count(Natural(7), Natural(3)) == 2);
  CHECK(ecf::two_torsion_count(Natural(11), Natural(5)) == 4);
  for (const std::uint64_t p : {5ULL, 7ULL, 11ULL, 13ULL})
    for (std::uint64_t b = 1; b < p; ++b) {
      unsigned torsion = 1;  // infinity
      for (std::uint64_t x = 0; x < p; ++x) {
        std::uint64_t rhs = ref::mulmod(x, x, p);
        rhs = (rhs + p - b) % p;
        rhs = ref::mulmod(rhs, x, p);
        if (rhs == 0) ++torsion;
      }
      CHECK(ecf::two_torsion_count(Natural(p), Natural(b)) == torsion);
    }
}

TEST_CASE("is_halvable fixed cases over a small field") {
  const std::array<Natural, 3> roots{Natural(0), Natural(1), Natural(6)};
  CHECK(ecf::is_halvable(Point::affine(Natural(1), Natural(0)), roots, Natural(7)));
  CHECK(!ecf::is_halvable(Point::affine(Natural(4), Natural(2)), roots, Natural(7)));
  CHECK(!ecf::is_halvable(Point::affine(Natural(0), Natural(0)), roots, Natural(7)));
}

TEST_CASE("is_halvable argument validation") {
  const std::array<Natural, 3> roots{Natural(0), Natural(1), Natural(6)};
  CHECK_THROWS_AS(ecf::is_halvable(Point::at_infinity(), roots, Natural(7)),
                  std::invalid_argument);
  CHECK_THROWS_AS(ecf::is_halvable(Point::affine(Natural(1), Natural(1)), roots, Natural(7)),
                  std::invalid_argument);
  const std::array<Natural, 3> repeated{Natural(0), Natural(1), Natural(8)};
  CHECK_THROWS_AS(ecf::is_halvable(Point::affine(Natural(1), Natural(0)), repeated, Natural(7)),
                  std::invalid_argument);
  CHECK_THROWS_AS(ecf::is_halvable(Point::affine(Natural(1), Natural(0)), roots, Natural(9)),
                  std::invalid_argument);
}

TEST_CASE("is_halvable matches the doubling image on sample curves") {
  for (const std::uint64_t p : {7ULL, 11ULL, 13ULL}) {
    for (std::uint64_t r1 = 1; r1 < p; ++r1)
      for (std::uint64_t r2 = r1 + 1; r2 < p; ++r2) {
        const std::uint64_t r0 = 0;
        const auto image = doubling_image(p, r0, r1, r2);
        const std::array<Natural, 3> roots{Natural(r0), Natural(r1), Natural(r2)};
        for (std::uint64_t x = 0; x < p; ++x) {
          std::uint64_t rhs = ref::mulmod(
              ref::mulmod((x + p - r1) % p, (x + p - r2) % p, p), (x + p - r0) % p, p);
          for (std::uint64_t y = 0; y < p; ++y) {
            if (ref::mulmod(y, y, p) != rhs) continue;
            const bool expected = image.count({x, y}) > 0;
            CHECK(ecf::is_halvable(Point::affine(Natural(x), Natural(y)), roots,
                                   Natural(p)) == expected);
          }
        }
      }
  }
}

TEST_CASE("product_E fixed values and validation") {
  CHECK(ecf::product_E(Natural(33), Natural(5)) == 48);
  CHECK(ecf::product_E(Natural(21), Natural(2)) == 32);
  CHECK(ecf::product_E(Natural(7), Natural(1)) == 8);
  CHECK_THROWS_AS(ecf::product_E(Natural(45), Natural(2)), std::invalid_argument);
  CHECK_THROWS_AS(ecf::product_E(Natural(33), Natural(3)), std::invalid_argument);
  CHECK_THROWS_AS(ecf::product_E(Natural(34), Natural(3)), std::invalid_argument);
}

TEST_CASE("product_E factors through the prime components") {
  for (const std::uint64_t n : {15ULL, 21ULL, 33ULL, 35ULL, 105ULL})
    for (std::uint64_t b = 1; b < 20; ++b) {
      if (std::gcd(b, n) != 1) continue;
      Natural expected = 1;
      for (const auto& [p, e] : ref::factor_trial(n))
        expected *= ecf::count_points(Natural(p), Natural(b));
      CHECK(ecf::product_E(Natural(n), Natural(b)) == expected);
    }
}

TEST_CASE("product_F fixed values") {
  CHECK(ecf::product_F(Natural(33), Natural(1)) == 48);
  CHECK(ecf::product_F(Natural(33), Natural(2)) == 2304);
  CHECK(ecf::product_F(Natural(33), Natural(3)) == 2304);  // b = 3 shares a factor
  CHECK_THROWS_AS(ecf::product_F(Natural(33), Natural(0)), std::invalid_argument);
}
