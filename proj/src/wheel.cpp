#include "wheelsieve/wheel.hpp"

#include <cassert>
#include <cmath>

namespace wheelsieve {

uint64_t value_of(WheelCoord coord) {
  if (coord.index > kMaxWheelIndex)
    throw Error(Errc::Overflow, "wheel index " + std::to_string(coord.index) +
                                    " exceeds the 64-bit value range");
  return 6 * coord.index + (coord.residue == ResidueClass::R1 ? 1 : 5);
}

WheelCoord coord_of(uint64_t n) {
  switch (n % 6) {
    case 1: return {n / 6, ResidueClass::R1};
    case 5: return {n / 6, ResidueClass::R5};
    default:
      throw Error(Errc::NotOnWheel,
                  std::to_string(n) + " is divisible by 2 or 3, not on the wheel");
  }
}

uint64_t isqrt(uint64_t n) {
  if (n == 0) return 0;
  // The double estimate is within one of the true root; fix it up exactly
  // with overflow-safe division checks.
  uint64_t r = static_cast<uint64_t>(std::sqrt(static_cast<double>(n)));
  while (r > 0 && r > n / r) --r;
  while (r + 1 <= n / (r + 1)) ++r;
  return r;
}

uint64_t ceil_sqrt(uint64_t n) {
  uint64_t r = isqrt(n);
  return r * r == n ? r : r + 1;
}

std::vector<uint64_t> naive_sieve(uint64_t n, uint64_t cap) {
  if (n < 2) throw Error(Errc::EmptyRange, "no primes below 2");
  if (n > cap || n == UINT64_MAX)
    throw Error(Errc::Capacity, "naive sieve bound " + std::to_string(n) +
                                    " exceeds the dense-array cap");
  std::vector<uint8_t> composite(n + 1, 0);
  for (uint64_t i = 2; i <= n / i; ++i) {
    if (composite[i]) continue;
    for (uint64_t j = i * i; j <= n; j += i) composite[j] = 1;
  }
  std::vector<uint64_t> primes;
  for (uint64_t i = 2; i <= n; ++i)
    if (!composite[i]) primes.push_back(i);
  return primes;
}

uint64_t greatest_multiple_below(uint64_t p, uint64_t m) {
  if (p == 0 || m <= p)
    throw Error(Errc::Domain, "no positive multiple of " + std::to_string(p) +
                                  " below " + std::to_string(m));
  return p * ((m - 1) / p);
}

namespace {

// Index increments from the anchor's wheel position to the next multiple of
// p in each residue class, as a linear form coeff * R + add with R = p / 6.
// One row per residue of p (1 or 5 mod 6), one column per residue of the
// anchor. Derivation: with p = 6R + pw and anchor Q = 6B + q, the next
// multiple of p congruent to r mod 6 is Q + c*p for the unique c in 1..6
// with q + c*pw = r (mod 6); the increment is then (c*p + q - r) / 6,
// expanded in R.
struct CellIncrement {
  uint32_t id1_coeff, id1_add;
  uint32_t id5_coeff, id5_add;
};

constexpr CellIncrement kStartIncrements[2][6] = {
    // p = 6R + 1, anchor residue q = 0..5
    {{1, 0, 5, 0}, {6, 1, 4, 0}, {5, 1, 3, 0}, {4, 1, 2, 0}, {3, 1, 1, 0}, {2, 1, 6, 1}},
    // p = 6R + 5, anchor residue q = 0..5
    {{5, 4, 1, 0}, {6, 5, 2, 1}, {1, 1, 3, 2}, {2, 2, 4, 3}, {3, 3, 5, 4}, {4, 4, 6, 5}},
};

}  // namespace

StartOffsets start_offsets_after(uint64_t p, uint64_t anchor) {
  assert(p % 6 == 1 || p % 6 == 5);
  assert(anchor % p == 0);
  const uint64_t base = anchor / 6;
  const uint64_t r = p / 6;
  const CellIncrement& cell = kStartIncrements[p % 6 == 5][anchor % 6];
  return {base + cell.id1_coeff * r + cell.id1_add,
          base + cell.id5_coeff * r + cell.id5_add};
}

StartOffsets start_offsets(uint64_t p, uint64_t segment_start) {
  if (p % 6 != 1 && p % 6 != 5)
    throw Error(Errc::Domain, "prime " + std::to_string(p) + " is not coprime to 6");
  if (segment_start % 6 != 0)
    throw Error(Errc::Alignment, "segment start " + std::to_string(segment_start) +
                                     " is not a multiple of 6");
  if (segment_start <= p)
    throw Error(Errc::Domain, "segment start " + std::to_string(segment_start) +
                                  " does not exceed the prime " + std::to_string(p));
  return start_offsets_after(p, greatest_multiple_below(p, segment_start));
}

}  // namespace wheelsieve
