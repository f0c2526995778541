#include "wheelsieve/segment.hpp"

#include <cstring>

#include "wheelsieve/base_store.hpp"
#include "wheelsieve/kernels.hpp"

namespace wheelsieve {

namespace {

uint64_t storage_words(uint64_t size, FlagWidth width) {
  switch (width) {
    case FlagWidth::Bit: return (size + 63) / 64;
    case FlagWidth::Byte: return (size + 7) / 8;
    case FlagWidth::Word4: return (size + 1) / 2;
  }
  return 0;
}

}  // namespace

FlagArray::FlagArray(uint64_t size, FlagWidth width)
    : size_(size), width_(width), storage_(storage_words(size, width), 0) {
  fill_true();
}

void FlagArray::fill_true() {
  switch (width_) {
    case FlagWidth::Bit: {
      std::fill(storage_.begin(), storage_.end(), ~uint64_t{0});
      // Keep tail bits beyond size_ at zero so word-granular counts and
      // scans need no masking.
      if (uint64_t tail = size_ & 63; tail != 0 && !storage_.empty())
        storage_.back() = (uint64_t{1} << tail) - 1;
      break;
    }
    case FlagWidth::Byte:
      std::memset(byte_view(), 1, size_);
      break;
    case FlagWidth::Word4: {
      uint32_t* v = u32_view();
      std::fill(v, v + size_, uint32_t{1});
      break;
    }
  }
}

void FlagArray::clear_stride(uint64_t first, uint64_t step) {
  assert(step > 0);
  switch (width_) {
    case FlagWidth::Bit: {
      uint64_t* words = storage_.data();
      for (uint64_t i = first; i < size_; i += step)
        words[i >> 6] &= ~(uint64_t{1} << (i & 63));
      break;
    }
    case FlagWidth::Byte: {
      uint8_t* bytes = byte_view();
      for (uint64_t i = first; i < size_; i += step) bytes[i] = 0;
      break;
    }
    case FlagWidth::Word4: {
      uint32_t* values = u32_view();
      for (uint64_t i = first; i < size_; i += step) values[i] = 0;
      break;
    }
  }
}

uint64_t FlagArray::count_true() const {
  switch (width_) {
    case FlagWidth::Bit: return kernels::popcount_words(bit_words());
    case FlagWidth::Byte: return kernels::count_nonzero_bytes({byte_view(), size_});
    case FlagWidth::Word4: return kernels::count_nonzero_u32({u32_view(), size_});
  }
  return 0;
}

std::optional<uint64_t> FlagArray::last_true() const {
  if (width_ == FlagWidth::Bit) {
    for (size_t wi = storage_.size(); wi-- > 0;) {
      if (storage_[wi] == 0) continue;
      return (uint64_t{wi} << 6) | (63 - static_cast<uint64_t>(std::countl_zero(storage_[wi])));
    }
    return std::nullopt;
  }
  for (uint64_t i = size_; i-- > 0;)
    if (test(i)) return i;
  return std::nullopt;
}

SegmentBitmap::SegmentBitmap(uint64_t segment_start, uint64_t wheel_len, FlagWidth width)
    : start_(segment_start),
      wheel_len_(checked_len(segment_start, wheel_len)),
      k0_(segment_start / 6),
      width_(width),
      r1_(wheel_len, width),
      r5_(wheel_len, width) {}

uint64_t SegmentBitmap::checked_len(uint64_t segment_start, uint64_t wheel_len) {
  if (segment_start % 6 != 0)
    throw Error(Errc::Alignment, "segment start " + std::to_string(segment_start) +
                                     " is not a multiple of 6");
  if (wheel_len == 0)
    throw Error(Errc::Domain, "segment must span at least one wheel index");
  if (wheel_len > (kMaxSegmentEnd - segment_start) / 6)
    throw Error(Errc::Overflow, "segment end exceeds the 64-bit value range");
  return wheel_len;
}

uint64_t SegmentBitmap::rel_index(uint64_t value, ResidueClass* r) const {
  WheelCoord coord = coord_of(value);
  if (coord.index < k0_ || coord.index - k0_ >= wheel_len_)
    throw Error(Errc::Domain, "value " + std::to_string(value) + " outside segment");
  *r = coord.residue;
  return coord.index - k0_;
}

bool SegmentBitmap::flag_for(uint64_t value) const {
  ResidueClass r;
  uint64_t k = rel_index(value, &r);
  return marks(r).test(k);
}

void SegmentBitmap::clear_value(uint64_t value) {
  ResidueClass r;
  uint64_t k = rel_index(value, &r);
  marks(r).clear(k);
}

void SegmentBitmap::clear_values_above(uint64_t bound) {
  const auto first_above = [&](uint64_t residue) {
    if (bound < start_ + residue) return uint64_t{0};
    return (bound - start_ - residue) / 6 + 1;
  };
  for (uint64_t k = first_above(1); k < wheel_len_; ++k) r1_.clear(k);
  for (uint64_t k = first_above(5); k < wheel_len_; ++k) r5_.clear(k);
}

uint64_t SegmentBitmap::count_surviving() const {
  return r1_.count_true() + r5_.count_true();
}

std::optional<uint64_t> SegmentBitmap::last_surviving() const {
  std::optional<uint64_t> k1 = r1_.last_true();
  std::optional<uint64_t> k5 = r5_.last_true();
  std::optional<uint64_t> best;
  if (k1) best = start_ + 6 * *k1 + 1;
  if (k5) {
    uint64_t v5 = start_ + 6 * *k5 + 5;
    if (!best || v5 > *best) best = v5;
  }
  return best;
}

std::vector<uint64_t> SegmentBitmap::surviving() const {
  std::vector<uint64_t> values;
  values.reserve(count_surviving());
  for_each_surviving([&](uint64_t v) { values.push_back(v); });
  return values;
}

void sieve_segment(SegmentBitmap& segment, const BasePrimeStore& base) {
  const uint64_t end = segment.end_value();
  if (!base.covers(end))
    throw Error(Errc::IncompleteBase,
                "base frontier " + std::to_string(base.frontier()) +
                    " cannot sieve a segment ending at " + std::to_string(end));
  const uint64_t start = segment.segment_start();
  const uint64_t k0 = segment.first_index();
  const uint64_t len = segment.wheel_len();
  FlagArray& r1 = segment.marks(ResidueClass::R1);
  FlagArray& r5 = segment.marks(ResidueClass::R5);
  for (const BasePrime& bp : base.entries()) {
    if (bp.square >= end) break;  // entries ascend; nothing further is active yet
    const uint64_t p = bp.value;
    // Anchor multiple strictly below the first value this prime may clear:
    // p*(p-1) when the square lies at or past the segment start (so the
    // first hit is exactly p*p), otherwise the greatest multiple below the
    // segment. Values below the square are left to smaller primes.
    const uint64_t anchor = bp.square >= start ? p * (p - 1) : p * ((start - 1) / p);
    const StartOffsets off = start_offsets_after(p, anchor);
    assert(off.id1 >= k0 && off.id5 >= k0);
    if (uint64_t rel = off.id1 - k0; rel < len) r1.clear_stride(rel, p);
    if (uint64_t rel = off.id5 - k0; rel < len) r5.clear_stride(rel, p);
  }
}

}  // namespace wheelsieve
