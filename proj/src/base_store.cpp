#include "wheelsieve/base_store.hpp"

#include "wheelsieve/segment.hpp"
#include "wheelsieve/wheel.hpp"

namespace wheelsieve {

namespace {

// Wheel indices per chunk when re-sieving a frontier gap. The gap work is
// square-root scale, so a modest fixed chunk keeps allocation flat.
constexpr uint64_t kExtendChunkLen = uint64_t{1} << 15;

uint64_t saturating_square(uint64_t v) {
  return v > UINT64_MAX / v ? UINT64_MAX : v * v;
}

uint64_t saturating_double(uint64_t v) {
  return v > UINT64_MAX / 2 ? UINT64_MAX : 2 * v;
}

}  // namespace

void BasePrimeStore::append_checked(uint64_t p, uint64_t bound) {
  if (p <= frontier_) return;  // already represented
  if (p > bound)
    throw Error(Errc::Domain, "prime " + std::to_string(p) +
                                  " lies beyond the new frontier " + std::to_string(bound));
  if (!entries_.empty() && p <= entries_.back().value)
    throw Error(Errc::Ordering, "base store primes must be strictly ascending");
  entries_.push_back({p, saturating_square(p)});
}

BasePrimeStore BasePrimeStore::bootstrap(uint64_t limit_hint) {
  if (limit_hint < 25)
    throw Error(Errc::Domain, "bootstrap hint below 25 would seed an empty store");
  BasePrimeStore store;
  store.frontier_ = ceil_sqrt(limit_hint);
  for (uint64_t p : naive_sieve(store.frontier_))
    if (p >= 5) store.entries_.push_back({p, p * p});
  return store;
}

void BasePrimeStore::extend(uint64_t new_frontier) {
  if (new_frontier <= frontier_) return;
  if (new_frontier > kMaxSegmentEnd - 6)
    throw Error(Errc::Overflow, "frontier beyond the sievable 64-bit range");
  const uint64_t target =
      std::min(std::max(new_frontier, saturating_double(frontier_)), kMaxSegmentEnd - 6);
  while (frontier_ < target) {
    const uint64_t stage_end = std::min(target, saturating_square(frontier_));
    // Sieve (frontier_, stage_end] in wheel-aligned chunks using only the
    // primes already present; each chunk end stays below frontier_^2 + 6,
    // within what the current entries can cover.
    const uint64_t lo = (frontier_ + 1) / 6 * 6;
    const uint64_t hi = (stage_end / 6 + 1) * 6;
    const uint64_t old_frontier = frontier_;
    for (uint64_t chunk = lo; chunk < hi; chunk += 6 * kExtendChunkLen) {
      const uint64_t chunk_len = std::min(kExtendChunkLen, (hi - chunk) / 6);
      SegmentBitmap segment(chunk, chunk_len);
      sieve_segment(segment, *this);
      if (chunk == 0) segment.clear_value(1);
      segment.for_each_surviving([&](uint64_t v) {
        if (v > old_frontier && v <= stage_end) entries_.push_back({v, saturating_square(v)});
      });
    }
    frontier_ = stage_end;
  }
}

void BasePrimeStore::absorb(std::span<const uint64_t> primes, uint64_t new_frontier) {
  if (new_frontier < frontier_)
    throw Error(Errc::Domain, "frontier may not move backwards");
  for (uint64_t p : primes) append_checked(p, new_frontier);
  frontier_ = new_frontier;
}

bool BasePrimeStore::covers(uint64_t segment_end) const {
  if (segment_end < 2) return true;
  return isqrt(segment_end - 1) <= frontier_;
}

}  // namespace wheelsieve
