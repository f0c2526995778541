#include <doctest.h>

#include <random>

#include "wheelsieve/wheel.hpp"

using namespace wheelsieve;

namespace {

// Independent primality check for cross-validation; shares nothing with the
// library's sieves.
bool trial_division_prime(uint64_t n) {
  if (n < 2) return false;
  for (uint64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

// Smallest multiple of p at or above start that is congruent to residue
// mod 6, found by stepping (p coprime to 6 walks all residues).
uint64_t brute_first_multiple(uint64_t p, uint64_t start, uint64_t residue) {
  uint64_t q = (start + p - 1) / p * p;
  while (q % 6 != residue) q += p;
  return q;
}

}  // namespace

TEST_CASE("value_of maps coordinates to wheel values") {
  CHECK(value_of({0, ResidueClass::R1}) == 1);
  CHECK(value_of({0, ResidueClass::R5}) == 5);
  CHECK(value_of({1, ResidueClass::R1}) == 7);
  CHECK(value_of({1, ResidueClass::R5}) == 11);
  CHECK(value_of({2407, ResidueClass::R1}) == 14443);
  CHECK(value_of({2402, ResidueClass::R5}) == 14417);
  CHECK(value_of({kMaxWheelIndex, ResidueClass::R5}) == 6 * kMaxWheelIndex + 5);
}

TEST_CASE("value_of rejects indexes past the 64-bit range") {
  CHECK_THROWS_WITH_AS(value_of({kMaxWheelIndex + 1, ResidueClass::R1}), doctest::Contains("64-bit"),
                       Error);
  try {
    value_of({kMaxWheelIndex + 1, ResidueClass::R5});
    FAIL("expected overflow error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::Overflow);
  }
}

TEST_CASE("coord_of inverts value_of and rejects off-wheel values") {
  CHECK(coord_of(1) == WheelCoord{0, ResidueClass::R1});
  CHECK(coord_of(5) == WheelCoord{0, ResidueClass::R5});
  CHECK(coord_of(7) == WheelCoord{1, ResidueClass::R1});
  CHECK(coord_of(14417) == WheelCoord{2402, ResidueClass::R5});
  for (uint64_t off_wheel : {uint64_t{0}, uint64_t{2}, uint64_t{3}, uint64_t{4}, uint64_t{6},
                             uint64_t{12}, uint64_t{9}, uint64_t{100}}) {
    try {
      coord_of(off_wheel);
      FAIL("expected not-on-wheel error for ", off_wheel);
    } catch (const Error& e) {
      CHECK(e.code() == Errc::NotOnWheel);
    }
  }
}

TEST_CASE("value/coord round trip on random coordinates") {
  std::mt19937_64 rng(42);
  std::uniform_int_distribution<uint64_t> index(0, kMaxWheelIndex);
  for (int trial = 0; trial < 20000; ++trial) {
    WheelCoord coord{index(rng), trial % 2 ? ResidueClass::R1 : ResidueClass::R5};
    CHECK(coord_of(value_of(coord)) == coord);
  }
}

TEST_CASE("isqrt and ceil_sqrt are exact at the edges") {
  CHECK(isqrt(0) == 0);
  CHECK(isqrt(1) == 1);
  CHECK(isqrt(24) == 4);
  CHECK(isqrt(25) == 5);
  CHECK(isqrt(26) == 5);
  CHECK(isqrt(UINT64_MAX) == 4294967295ull);
  CHECK(ceil_sqrt(0) == 0);
  CHECK(ceil_sqrt(1) == 1);
  CHECK(ceil_sqrt(24) == 5);
  CHECK(ceil_sqrt(25) == 5);
  CHECK(ceil_sqrt(26) == 6);
  CHECK(ceil_sqrt(1'000'000) == 1000);
  CHECK(ceil_sqrt(1'000'001) == 1001);

  std::mt19937_64 rng(7);
  std::uniform_int_distribution<uint64_t> roots(1, 4294967294ull);
  for (int trial = 0; trial < 5000; ++trial) {
    uint64_t r = roots(rng);
    CHECK(isqrt(r * r) == r);
    CHECK(isqrt(r * r - 1) == r - 1);
    CHECK(isqrt(r * r + 1) == r);
  }
}

TEST_CASE("naive_sieve matches the hand list up to 100") {
  const std::vector<uint64_t> first25 = {2,  3,  5,  7,  11, 13, 17, 19, 23, 29, 31, 37, 41,
                                         43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97};
  CHECK(naive_sieve(100) == first25);
  CHECK(naive_sieve(2) == std::vector<uint64_t>{2});
  CHECK(naive_sieve(3) == std::vector<uint64_t>{2, 3});
  CHECK(naive_sieve(10) == std::vector<uint64_t>{2, 3, 5, 7});
}

TEST_CASE("naive_sieve agrees with trial division up to 10000") {
  const std::vector<uint64_t> primes = naive_sieve(10000);
  CHECK(primes.size() == 1229);
  size_t at = 0;
  for (uint64_t n = 0; n <= 10000; ++n) {
    const bool is_prime = at < primes.size() && primes[at] == n;
    CHECK(is_prime == trial_division_prime(n));
    if (is_prime) ++at;
  }
}

TEST_CASE("naive_sieve validates its range and cap") {
  try {
    naive_sieve(1);
    FAIL("expected empty-range error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::EmptyRange);
  }
  try {
    naive_sieve(1001, 1000);
    FAIL("expected capacity error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::Capacity);
  }
}

TEST_CASE("greatest_multiple_below on known points") {
  CHECK(greatest_multiple_below(13, 14400) == 14391);
  CHECK(greatest_multiple_below(5, 30) == 25);
  CHECK(greatest_multiple_below(7, 49) == 42);
  CHECK(greatest_multiple_below(7, 50) == 49);
  CHECK(greatest_multiple_below(5, 6) == 5);
  for (auto [p, m] : {std::pair<uint64_t, uint64_t>{7, 7}, {7, 5}, {0, 10}}) {
    try {
      greatest_multiple_below(p, m);
      FAIL("expected domain error for ", p, ",", m);
    } catch (const Error& e) {
      CHECK(e.code() == Errc::Domain);
    }
  }
}

TEST_CASE("start_offsets reproduces the worked thirteen case") {
  const StartOffsets off = start_offsets(13, 14400);
  CHECK(off == StartOffsets{2407, 2402});
  CHECK(value_of({off.id1, ResidueClass::R1}) == 14443);
  CHECK(value_of({off.id5, ResidueClass::R5}) == 14417);
  CHECK(14443 % 13 == 0);
  CHECK(14417 % 13 == 0);
}

TEST_CASE("start_offsets on small documented points") {
  const StartOffsets five = start_offsets(5, 30);
  CHECK(value_of({five.id1, ResidueClass::R1}) == 55);
  CHECK(value_of({five.id5, ResidueClass::R5}) == 35);
  const StartOffsets seven = start_offsets(7, 48);
  CHECK(value_of({seven.id1, ResidueClass::R1}) == 49);
  CHECK(value_of({seven.id5, ResidueClass::R5}) == 77);
}

TEST_CASE("start_offsets agrees with stepping search over random segments") {
  std::mt19937_64 rng(1234);
  uint64_t covered_cells = 0;
  for (uint64_t p : naive_sieve(10007)) {
    if (p < 5) continue;
    std::uniform_int_distribution<uint64_t> start6(p / 6 + 1, 166'666);
    for (int trial = 0; trial < 40; ++trial) {
      const uint64_t start = 6 * start6(rng);
      const StartOffsets off = start_offsets(p, start);
      CHECK(value_of({off.id1, ResidueClass::R1}) == brute_first_multiple(p, start, 1));
      CHECK(value_of({off.id5, ResidueClass::R5}) == brute_first_multiple(p, start, 5));
      covered_cells |= uint64_t{1}
                       << ((p % 6 == 5 ? 6 : 0) + greatest_multiple_below(p, start) % 6);
    }
  }
  CHECK(covered_cells == 0xfff);  // all twelve residue combinations exercised
}

TEST_CASE("start offsets land within one stride of the segment start") {
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<uint64_t> start6(2, 1'000'000);
  for (uint64_t p : {5ull, 7ull, 11ull, 101ull, 997ull, 10007ull}) {
    for (int trial = 0; trial < 200; ++trial) {
      uint64_t start = 6 * start6(rng);
      if (start <= p) continue;
      const StartOffsets off = start_offsets(p, start);
      const uint64_t v1 = value_of({off.id1, ResidueClass::R1});
      const uint64_t v5 = value_of({off.id5, ResidueClass::R5});
      CHECK(v1 >= start);
      CHECK(v5 >= start);
      CHECK(v1 < start + 6 * p);
      CHECK(v5 < start + 6 * p);
    }
  }
}

TEST_CASE("stepping from a start offset stays on multiples in the same class") {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<uint64_t> start6(2, 100'000);
  for (uint64_t p : {5ull, 13ull, 9973ull}) {
    for (int trial = 0; trial < 50; ++trial) {
      const uint64_t start = 6 * start6(rng);
      if (start <= p) continue;
      const StartOffsets off = start_offsets(p, start);
      for (uint64_t k = 0; k < 5; ++k) {
        CHECK(value_of({off.id1 + k * p, ResidueClass::R1}) % p == 0);
        CHECK(value_of({off.id5 + k * p, ResidueClass::R5}) % p == 0);
      }
    }
  }
}

TEST_CASE("the activation anchor puts the first hit exactly on the square") {
  for (uint64_t p : naive_sieve(1000)) {
    if (p < 5) continue;
    const StartOffsets off = start_offsets_after(p, p * (p - 1));
    // Squares of wheel primes are always 1 mod 6, so the square lands in the
    // R1 progression and the R5 start is the first larger multiple there.
    CHECK(value_of({off.id1, ResidueClass::R1}) == p * p);
    const uint64_t v5 = value_of({off.id5, ResidueClass::R5});
    CHECK(v5 > p * (p - 1));
    CHECK(v5 % p == 0);
    CHECK(v5 % 6 == 5);
  }
}

TEST_CASE("start_offsets validates its arguments") {
  try {
    start_offsets(9, 60);  // 9 is 3 mod 6
    FAIL("expected domain error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::Domain);
  }
  try {
    start_offsets(5, 32);
    FAIL("expected alignment error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::Alignment);
  }
  try {
    start_offsets(13, 12);
    FAIL("expected domain error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::Domain);
  }
}
