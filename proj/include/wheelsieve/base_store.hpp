#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "wheelsieve/errors.hpp"

namespace wheelsieve {

/// One sieving prime with its cached square. The square is what activation
/// checks compare against, so it is computed once here (saturated to the
/// 64-bit maximum when p*p would not fit, which simply keeps such a prime
/// inactive for every representable segment).
struct BasePrime {
  uint64_t value;
  uint64_t square;
};

/// Ascending store of the sieving primes. Holds exactly the primes in
/// [5, frontier]; 2 and 3 never appear because the wheel already excludes
/// their multiples. Growth is incremental: either absorb primes the sieve
/// itself just produced, or extend by re-sieving the gap, which needs no
/// external input because primes up to F suffice to sieve up to F*F.
class BasePrimeStore {
 public:
  /// Seed the store for sieving up to limit_hint: runs the naive reference
  /// sieve up to ceil(sqrt(limit_hint)) and keeps the wheel primes.
  /// limit_hint must be at least 25 so the store starts non-empty.
  static BasePrimeStore bootstrap(uint64_t limit_hint);

  /// Grow the frontier to at least new_frontier by sieving the gap with the
  /// store itself, staged so each stage stays within the current frontier's
  /// square. Grows geometrically (at least doubling) so repeated small
  /// requests cost amortized near-nothing. No-op if already covered.
  void extend(uint64_t new_frontier);

  /// Append externally produced primes and advance the frontier. `primes`
  /// must be strictly ascending, lie in (frontier, new_frontier], and
  /// together with the current entries leave no prime <= new_frontier
  /// missing; values at or below the current frontier are ignored so a
  /// caller may pass a batch that overlaps what is already known.
  void absorb(std::span<const uint64_t> primes, uint64_t new_frontier);

  /// Every prime <= frontier() is present.
  uint64_t frontier() const { return frontier_; }

  /// True when the store suffices to sieve a segment ending (exclusive) at
  /// segment_end, i.e. frontier >= sqrt(segment_end - 1).
  bool covers(uint64_t segment_end) const;

  std::span<const BasePrime> entries() const { return entries_; }
  size_t size() const { return entries_.size(); }

 private:
  BasePrimeStore() = default;
  void append_checked(uint64_t p, uint64_t bound);

  std::vector<BasePrime> entries_;
  uint64_t frontier_ = 0;
};

}  // namespace wheelsieve
