#if defined(__aarch64__)

#include <arm_neon.h>

#include <bit>

#include "wheelsieve/kernels.hpp"

namespace wheelsieve::kernels::neon {

uint64_t popcount_words(std::span<const uint64_t> words) {
  uint64_t total = 0;
  size_t i = 0;
  const size_t vec_end = words.size() / 2 * 2;
  for (; i < vec_end; i += 2) {
    uint8x16_t v = vreinterpretq_u8_u64(vld1q_u64(words.data() + i));
    // Per-block popcount is at most 128, so the cross-lane u16 sum is safe.
    total += vaddlvq_u8(vcntq_u8(v));
  }
  for (; i < words.size(); ++i) total += static_cast<uint64_t>(std::popcount(words[i]));
  return total;
}

uint64_t count_nonzero_bytes(std::span<const uint8_t> bytes) {
  uint64_t total = 0;
  size_t i = 0;
  const size_t vec_end = bytes.size() / 16 * 16;
  for (; i < vec_end; i += 16) {
    uint8x16_t v = vld1q_u8(bytes.data() + i);
    // 0xFF per zero byte, shifted down to one, summed across lanes.
    uint8x16_t zero_ones = vshrq_n_u8(vceqq_u8(v, vdupq_n_u8(0)), 7);
    total += 16 - vaddlvq_u8(zero_ones);
  }
  for (; i < bytes.size(); ++i) total += bytes[i] != 0;
  return total;
}

uint64_t count_nonzero_u32(std::span<const uint32_t> values) {
  uint64_t total = 0;
  size_t i = 0;
  const size_t vec_end = values.size() / 4 * 4;
  for (; i < vec_end; i += 4) {
    uint32x4_t v = vld1q_u32(values.data() + i);
    uint32x4_t zero_ones = vshrq_n_u32(vceqq_u32(v, vdupq_n_u32(0)), 31);
    total += 4 - vaddvq_u32(zero_ones);
  }
  for (; i < values.size(); ++i) total += values[i] != 0;
  return total;
}

}  // namespace wheelsieve::kernels::neon

#endif
