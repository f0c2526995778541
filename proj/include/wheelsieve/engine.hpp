#pragma once

#include <atomic>
#include <cstdint>
#include <optional>
#include <vector>

#include "wheelsieve/segment.hpp"
#include "wheelsieve/sink.hpp"

namespace wheelsieve {

struct SieveConfig {
  /// Inclusive upper bound, or nullopt to run until stopped (or until the
  /// 64-bit range ends).
  std::optional<uint64_t> limit;
  unsigned threads = 1;
  /// Value span per iteration; must be a positive multiple of 6 * threads so
  /// it tiles into equal wheel-aligned worker sub-ranges. The CLI rounds
  /// user input up to this granularity; see round_segment_span.
  uint64_t segment_span = 6'000'000;
  FlagWidth flag_width = FlagWidth::Bit;
  PrimeSink* sink = nullptr;
  /// Spawn fresh worker threads every iteration instead of reusing a pool
  /// (for measuring thread start-up cost).
  bool spawn_per_iteration = false;
  /// Oversubscription guard; thread counts above this are rejected.
  unsigned thread_cap = 1024;
};

/// One worker's tile of an iteration: the contiguous value range [lo, hi).
/// Iteration i covers [i*S, (i+1)*S) split into `threads` equal disjoint
/// tiles in worker order.
struct WorkerAssignment {
  uint64_t iteration;
  unsigned worker;
  uint64_t lo;
  uint64_t hi;
  bool operator==(const WorkerAssignment&) const = default;
};

struct SieveReport {
  uint64_t prime_count = 0;
  uint64_t largest_prime = 0;
  uint64_t iterations = 0;
  double wall_ms = 0.0;
  /// Peak flag storage across iterations, summed over workers (analytic:
  /// the arrays hold one third of the value span in entries).
  uint64_t peak_flag_bytes = 0;
  uint64_t peak_flag_entries = 0;
  /// Exclusive bound through which primes were fully emitted.
  uint64_t sieved_to = 0;
  bool stopped = false;     // stop flag honored after a completed iteration
  bool overflowed = false;  // ran off the 64-bit value range (unbounded runs)
};

/// Thrown when the sink fails mid-run; carries what had been safely emitted
/// before the failure.
class SinkFailure : public Error {
 public:
  SinkFailure(Errc code, const std::string& what, SieveReport partial)
      : Error(code, what), partial_(partial) {}
  const SieveReport& partial() const { return partial_; }

 private:
  SieveReport partial_;
};

/// Smallest multiple of 6 * threads at or above span (at least one tile of
/// 6 per worker).
uint64_t round_segment_span(uint64_t span, unsigned threads);

/// Pure tiling of iteration `iteration` into per-worker ranges. Throws
/// Errc::Overflow when the iteration would leave the 64-bit value range and
/// Errc::BadConfig for an invalid thread count or span.
std::vector<WorkerAssignment> plan_iteration(const SieveConfig& config, uint64_t iteration);

/// Sieve every prime up to config.limit (required here) into config.sink:
/// 2, 3, then all wheel primes in ascending order. Workers sieve disjoint
/// tiles in parallel; emission happens in worker order after each
/// iteration's barrier, so output order is deterministic for every thread
/// count. Returns exact totals.
SieveReport run(const SieveConfig& config);

/// Endless variant (config.limit must be nullopt). Checks `stop` between
/// iterations: once set, the current iteration still completes and emits,
/// then the run returns with stopped = true. Reaching the end of the 64-bit
/// range sets overflowed instead.
SieveReport run_unbounded(const SieveConfig& config, const std::atomic<bool>& stop);

}  // namespace wheelsieve
