#pragma once

#include <bit>
#include <cassert>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "wheelsieve/errors.hpp"
#include "wheelsieve/wheel.hpp"

namespace wheelsieve {

class BasePrimeStore;

/// Storage width of one primality flag. Bit is the packed default; Byte
/// trades memory for unmasked loads and stores; Word4 reproduces 4-byte flag
/// entries for memory-footprint experiments.
enum class FlagWidth : uint8_t { Bit, Byte, Word4 };

/// Payload bytes needed for `count` flags at a given width.
constexpr uint64_t flag_payload_bytes(uint64_t count, FlagWidth width) {
  switch (width) {
    case FlagWidth::Bit: return (count + 7) / 8;
    case FlagWidth::Byte: return count;
    case FlagWidth::Word4: return 4 * count;
  }
  return 0;
}

/// Fixed-size array of boolean flags with a configurable storage width.
/// Flags start true (candidate prime) and are only ever cleared.
class FlagArray {
 public:
  FlagArray(uint64_t size, FlagWidth width);

  uint64_t size() const { return size_; }
  FlagWidth width() const { return width_; }
  uint64_t payload_bytes() const { return flag_payload_bytes(size_, width_); }

  void fill_true();

  bool test(uint64_t i) const {
    assert(i < size_);
    switch (width_) {
      case FlagWidth::Bit: return (storage_[i >> 6] >> (i & 63)) & 1;
      case FlagWidth::Byte: return byte_view()[i] != 0;
      case FlagWidth::Word4: return u32_view()[i] != 0;
    }
    return false;
  }

  void clear(uint64_t i) {
    assert(i < size_);
    switch (width_) {
      case FlagWidth::Bit: storage_[i >> 6] &= ~(uint64_t{1} << (i & 63)); break;
      case FlagWidth::Byte: byte_view()[i] = 0; break;
      case FlagWidth::Word4: u32_view()[i] = 0; break;
    }
  }

  /// Clear flags first, first+step, first+2*step, ... below size().
  void clear_stride(uint64_t first, uint64_t step);

  uint64_t count_true() const;
  std::optional<uint64_t> last_true() const;

  // Raw views for the scan and count paths. Bit mode keeps any unused tail
  // bits of the final word at zero so whole-word scans stay exact.
  std::span<const uint64_t> bit_words() const {
    return {storage_.data(), storage_.size()};
  }
  const uint8_t* byte_view() const { return reinterpret_cast<const uint8_t*>(storage_.data()); }
  const uint32_t* u32_view() const { return reinterpret_cast<const uint32_t*>(storage_.data()); }

 private:
  uint8_t* byte_view() { return reinterpret_cast<uint8_t*>(storage_.data()); }
  uint32_t* u32_view() { return reinterpret_cast<uint32_t*>(storage_.data()); }

  uint64_t size_;
  FlagWidth width_;
  std::vector<uint64_t> storage_;
};

/// Primality flags for one segment [segment_start, segment_start + 6*len):
/// one FlagArray per residue class, indexed relative to the segment. The
/// flag at relative index k in class R1 stands for the value
/// segment_start + 6k + 1, in class R5 for segment_start + 6k + 5.
class SegmentBitmap {
 public:
  /// segment_start must be a multiple of 6, wheel_len at least 1, and the
  /// end value representable in 64 bits.
  SegmentBitmap(uint64_t segment_start, uint64_t wheel_len, FlagWidth width = FlagWidth::Bit);

  uint64_t segment_start() const { return start_; }
  uint64_t wheel_len() const { return wheel_len_; }
  uint64_t first_index() const { return k0_; }
  uint64_t end_value() const { return start_ + 6 * wheel_len_; }
  FlagWidth width() const { return width_; }

  /// Auxiliary-storage accounting: flags held = 2 * wheel_len, one third of
  /// the value span.
  uint64_t flag_entries() const { return 2 * wheel_len_; }
  uint64_t flag_bytes() const { return 2 * flag_payload_bytes(wheel_len_, width_); }

  FlagArray& marks(ResidueClass r) { return r == ResidueClass::R1 ? r1_ : r5_; }
  const FlagArray& marks(ResidueClass r) const { return r == ResidueClass::R1 ? r1_ : r5_; }

  /// Flag lookup / clear by value. The value must lie on the wheel
  /// (Errc::NotOnWheel) and inside the segment (Errc::Domain).
  bool flag_for(uint64_t value) const;
  void clear_value(uint64_t value);

  /// Clear every flag whose value exceeds `bound` (used to trim a final
  /// segment that overshoots the requested limit).
  void clear_values_above(uint64_t bound);

  uint64_t count_surviving() const;
  std::optional<uint64_t> last_surviving() const;

  /// Visit surviving values in ascending order.
  template <typename F>
  void for_each_surviving(F&& visit) const {
    const uint64_t base = start_;
    if (width_ == FlagWidth::Bit) {
      std::span<const uint64_t> w1 = r1_.bit_words();
      std::span<const uint64_t> w5 = r5_.bit_words();
      for (size_t wi = 0; wi < w1.size(); ++wi) {
        uint64_t m1 = w1[wi], m5 = w5[wi];
        uint64_t both = m1 | m5;
        while (both) {
          const int bit = std::countr_zero(both);
          both &= both - 1;
          const uint64_t k = (uint64_t{wi} << 6) | static_cast<uint64_t>(bit);
          if ((m1 >> bit) & 1) visit(base + 6 * k + 1);
          if ((m5 >> bit) & 1) visit(base + 6 * k + 5);
        }
      }
    } else {
      for (uint64_t k = 0; k < wheel_len_; ++k) {
        if (r1_.test(k)) visit(base + 6 * k + 1);
        if (r5_.test(k)) visit(base + 6 * k + 5);
      }
    }
  }

  std::vector<uint64_t> surviving() const;

 private:
  static uint64_t checked_len(uint64_t segment_start, uint64_t wheel_len);
  uint64_t rel_index(uint64_t value, ResidueClass* r) const;

  uint64_t start_;
  uint64_t wheel_len_;
  uint64_t k0_;
  FlagWidth width_;
  FlagArray r1_;
  FlagArray r5_;
};

/// Cross off every multiple of every active base prime inside the segment.
/// A prime p is active once p*p lies below the segment end; its first
/// cleared value is never below p*p, so p itself always survives and work
/// below the square (already covered by smaller primes) is skipped.
/// Throws Errc::IncompleteBase if the base store's frontier is below
/// sqrt(end - 1).
void sieve_segment(SegmentBitmap& segment, const BasePrimeStore& base);

}  // namespace wheelsieve
