#pragma once

#include <cstdint>
#include <vector>

#include "wheelsieve/errors.hpp"

namespace wheelsieve {

/// Residue class of a value coprime to 6. Every integer greater than 3 that
/// is not divisible by 2 or 3 is congruent to 1 or 5 mod 6, so the sieve
/// keeps flags for exactly these two progressions.
enum class ResidueClass : uint8_t { R1, R5 };

/// Position on the mod-6 wheel: value = 6*index + 1 for R1, 6*index + 5 for
/// R5. (0, R1) denotes the value 1, which is never prime; (0, R5) denotes 5.
struct WheelCoord {
  uint64_t index;
  ResidueClass residue;
  bool operator==(const WheelCoord&) const = default;
};

/// Absolute wheel indices of the first multiple of a prime in each residue
/// class at or beyond some segment start. id1 indexes the 6k+1 progression,
/// id5 the 6k+5 progression.
struct StartOffsets {
  uint64_t id1;
  uint64_t id5;
  bool operator==(const StartOffsets&) const = default;
};

/// Largest wheel index for which 6*index + 5 still fits in 64 bits.
inline constexpr uint64_t kMaxWheelIndex = (UINT64_MAX - 5) / 6;

/// Exclusive upper bound on segment end values: the smallest multiple of 6
/// above every representable wheel value.
inline constexpr uint64_t kMaxSegmentEnd = 6 * (kMaxWheelIndex + 1);

/// Dense-array cap for naive_sieve (one byte per candidate).
inline constexpr uint64_t kDefaultNaiveCap = 100'000'000;

/// value = 6*index + 1 or 6*index + 5. Throws Errc::Overflow if the value
/// does not fit in 64 bits.
uint64_t value_of(WheelCoord coord);

/// Inverse of value_of. Throws Errc::NotOnWheel unless n is 1 or 5 mod 6.
WheelCoord coord_of(uint64_t n);

/// floor(sqrt(n)), exact for all 64-bit n.
uint64_t isqrt(uint64_t n);

/// ceil(sqrt(n)), exact for all 64-bit n.
uint64_t ceil_sqrt(uint64_t n);

/// Reference enumeration of all primes <= n by the textbook dense sieve,
/// starting each prime's crossing-off at its square. This is the oracle the
/// wheel pipeline is tested against; it shares no code with it.
/// Throws Errc::EmptyRange for n < 2 and Errc::Capacity for n > cap.
std::vector<uint64_t> naive_sieve(uint64_t n, uint64_t cap = kDefaultNaiveCap);

/// Greatest multiple of p that is strictly below m, i.e. p * floor((m-1)/p).
/// Throws Errc::Domain when m <= p (no positive multiple below m exists).
uint64_t greatest_multiple_below(uint64_t p, uint64_t m);

/// Start offsets derived from a known anchor multiple of p: the wheel
/// indices of the smallest multiples of p strictly above `anchor` in each
/// residue class. Constant time; this is the table-driven core of
/// start_offsets and of the activation rule for a prime entering the sieve
/// at its square (anchor p*(p-1) puts id1 exactly on p*p).
/// Requires p coprime to 6 and anchor a multiple of p.
StartOffsets start_offsets_after(uint64_t p, uint64_t anchor);

/// Wheel indices of the first multiples of p at or beyond segment_start in
/// both residue classes. segment_start must be a positive multiple of 6
/// exceeding p; callers handle the region below p*p via the activation rule
/// instead (multiples there have a smaller prime factor and are cleared by
/// it, so clearing them again would be wasted work, and p itself must never
/// be cleared).
/// Throws Errc::Domain if p is not coprime to 6 or segment_start <= p, and
/// Errc::Alignment if segment_start is not a multiple of 6.
StartOffsets start_offsets(uint64_t p, uint64_t segment_start);

}  // namespace wheelsieve
