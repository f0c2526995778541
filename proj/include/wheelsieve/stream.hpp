#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "wheelsieve/base_store.hpp"
#include "wheelsieve/segment.hpp"

namespace wheelsieve {

/// Unbounded incremental prime enumerator: yields 2, 3, then every wheel
/// prime in ascending order, one segment at a time. The base store grows on
/// demand from the stream's own progress (primes up to F cover segments up
/// to F*F), so no upper bound is ever fixed in advance.
class PrimeStream {
 public:
  /// segment_wheel_len is the number of wheel indices sieved per refill
  /// (value span 6 * segment_wheel_len).
  explicit PrimeStream(uint64_t segment_wheel_len, FlagWidth width = FlagWidth::Bit);

  /// Next prime, or nullopt after the enumeration has run off the end of
  /// the 64-bit range. Once nullopt is returned, overflowed() is true and
  /// every later call returns nullopt again.
  std::optional<uint64_t> next();

  bool overflowed() const { return overflowed_; }
  uint64_t segment_wheel_len() const { return wheel_len_; }
  const BasePrimeStore& base() const { return base_; }

  /// True when a segment [segment_start, segment_start + 6*wheel_len) would
  /// leave the representable value range.
  static bool segment_would_overflow(uint64_t segment_start, uint64_t wheel_len);

 private:
  void refill();

  uint64_t wheel_len_;
  FlagWidth width_;
  BasePrimeStore base_;
  uint64_t next_start_ = 0;
  std::vector<uint64_t> buffer_;
  size_t pos_ = 0;
  uint8_t prelude_pos_ = 0;  // 2 and 3 precede the wheel
  bool overflowed_ = false;
};

}  // namespace wheelsieve
