#include "wheelsieve/stream.hpp"

#include "wheelsieve/wheel.hpp"

namespace wheelsieve {

namespace {

uint64_t checked_stream_len(uint64_t wheel_len) {
  if (wheel_len == 0)
    throw Error(Errc::Domain, "segment must span at least one wheel index");
  if (wheel_len > kMaxSegmentEnd / 6)
    throw Error(Errc::Overflow, "segment span exceeds the 64-bit value range");
  return wheel_len;
}

}  // namespace

PrimeStream::PrimeStream(uint64_t segment_wheel_len, FlagWidth width)
    : wheel_len_(checked_stream_len(segment_wheel_len)),
      width_(width),
      base_(BasePrimeStore::bootstrap(std::max<uint64_t>(25, 6 * wheel_len_))) {}

bool PrimeStream::segment_would_overflow(uint64_t segment_start, uint64_t wheel_len) {
  return segment_start >= kMaxSegmentEnd || wheel_len > (kMaxSegmentEnd - segment_start) / 6;
}

void PrimeStream::refill() {
  if (segment_would_overflow(next_start_, wheel_len_)) {
    overflowed_ = true;
    return;
  }
  const uint64_t end = next_start_ + 6 * wheel_len_;
  base_.extend(isqrt(end - 1));
  SegmentBitmap segment(next_start_, wheel_len_, width_);
  sieve_segment(segment, base_);
  if (next_start_ == 0) segment.clear_value(1);
  buffer_ = segment.surviving();
  pos_ = 0;
  next_start_ = end;
}

std::optional<uint64_t> PrimeStream::next() {
  if (prelude_pos_ < 2) return prelude_pos_++ == 0 ? 2 : 3;
  while (pos_ == buffer_.size()) {
    if (overflowed_) return std::nullopt;
    refill();  // may come back empty (prime-free span); try the next segment
  }
  return buffer_[pos_++];
}

}  // namespace wheelsieve
