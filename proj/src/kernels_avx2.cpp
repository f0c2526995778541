#if defined(__x86_64__) || defined(__i386__)

#include <immintrin.h>

#include <bit>

#include "wheelsieve/kernels.hpp"

namespace wheelsieve::kernels::avx2 {

namespace {

inline uint64_t hsum_u64(__m256i v) {
  __m128i s = _mm_add_epi64(_mm256_castsi256_si128(v), _mm256_extracti128_si256(v, 1));
  return static_cast<uint64_t>(_mm_cvtsi128_si64(s)) +
         static_cast<uint64_t>(_mm_extract_epi64(s, 1));
}

}  // namespace

uint64_t popcount_words(std::span<const uint64_t> words) {
  // Nibble-table popcount: per-byte counts via two shuffles, folded into
  // 64-bit lanes with a sum-of-absolute-differences against zero. Each
  // 32-byte block contributes at most 256, added into 64-bit accumulators
  // every iteration, so the accumulator cannot overflow.
  const __m256i table = _mm256_setr_epi8(0, 1, 1, 2, 1, 2, 2, 3, 1, 2, 2, 3, 2, 3, 3, 4,
                                         0, 1, 1, 2, 1, 2, 2, 3, 1, 2, 2, 3, 2, 3, 3, 4);
  const __m256i low_mask = _mm256_set1_epi8(0x0f);
  __m256i acc = _mm256_setzero_si256();
  size_t i = 0;
  const size_t vec_end = words.size() / 4 * 4;
  for (; i < vec_end; i += 4) {
    __m256i v = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(words.data() + i));
    __m256i lo = _mm256_and_si256(v, low_mask);
    __m256i hi = _mm256_and_si256(_mm256_srli_epi32(v, 4), low_mask);
    __m256i per_byte =
        _mm256_add_epi8(_mm256_shuffle_epi8(table, lo), _mm256_shuffle_epi8(table, hi));
    acc = _mm256_add_epi64(acc, _mm256_sad_epu8(per_byte, _mm256_setzero_si256()));
  }
  uint64_t total = hsum_u64(acc);
  for (; i < words.size(); ++i) total += static_cast<uint64_t>(std::popcount(words[i]));
  return total;
}

uint64_t count_nonzero_bytes(std::span<const uint8_t> bytes) {
  const __m256i zero = _mm256_setzero_si256();
  uint64_t total = 0;
  size_t i = 0;
  const size_t vec_end = bytes.size() / 32 * 32;
  for (; i < vec_end; i += 32) {
    __m256i v = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(bytes.data() + i));
    uint32_t zero_mask =
        static_cast<uint32_t>(_mm256_movemask_epi8(_mm256_cmpeq_epi8(v, zero)));
    total += 32 - std::popcount(zero_mask);
  }
  for (; i < bytes.size(); ++i) total += bytes[i] != 0;
  return total;
}

uint64_t count_nonzero_u32(std::span<const uint32_t> values) {
  const __m256i zero = _mm256_setzero_si256();
  uint64_t total = 0;
  size_t i = 0;
  const size_t vec_end = values.size() / 8 * 8;
  for (; i < vec_end; i += 8) {
    __m256i v = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(values.data() + i));
    __m256i eq = _mm256_cmpeq_epi32(v, zero);
    uint32_t zero_mask =
        static_cast<uint32_t>(_mm256_movemask_ps(_mm256_castsi256_ps(eq)));
    total += 8 - std::popcount(zero_mask);
  }
  for (; i < values.size(); ++i) total += values[i] != 0;
  return total;
}

}  // namespace wheelsieve::kernels::avx2

#endif
