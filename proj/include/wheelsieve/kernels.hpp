#pragma once

#include <cstdint>
#include <optional>
#include <span>

namespace wheelsieve::kernels {

/// Implementation family behind the dispatched entry points below.
enum class Backend : uint8_t { Scalar, Avx2, Neon };

Backend active_backend();
const char* backend_name(Backend b);

/// Pin the dispatched kernels to one backend, or restore auto-detection with
/// nullopt. Throws Errc::Domain if the backend is not available on this
/// machine. Not meant to be called while a sieve is running.
void force_backend(std::optional<Backend> b);

/// Population count over a packed bit array.
uint64_t popcount_words(std::span<const uint64_t> words);

/// Number of nonzero bytes (byte-per-flag arrays).
uint64_t count_nonzero_bytes(std::span<const uint8_t> bytes);

/// Number of nonzero 32-bit entries (4-byte-per-flag arrays).
uint64_t count_nonzero_u32(std::span<const uint32_t> values);

/// Portable reference implementations. These are the correctness oracle the
/// vector backends are tested against, and the fallback on plain hardware.
namespace scalar {
uint64_t popcount_words(std::span<const uint64_t> words);
uint64_t count_nonzero_bytes(std::span<const uint8_t> bytes);
uint64_t count_nonzero_u32(std::span<const uint32_t> values);
}  // namespace scalar

#if defined(__x86_64__) || defined(__i386__)
// Compiled with -mavx2 in a separate translation unit; only reached after a
// cpuid check at dispatch time.
namespace avx2 {
uint64_t popcount_words(std::span<const uint64_t> words);
uint64_t count_nonzero_bytes(std::span<const uint8_t> bytes);
uint64_t count_nonzero_u32(std::span<const uint32_t> values);
}  // namespace avx2
#endif

#if defined(__aarch64__)
namespace neon {
uint64_t popcount_words(std::span<const uint64_t> words);
uint64_t count_nonzero_bytes(std::span<const uint8_t> bytes);
uint64_t count_nonzero_u32(std::span<const uint32_t> values);
}  // namespace neon
#endif

}  // namespace wheelsieve::kernels
