#include "wheelsieve/kernels.hpp"

#include <bit>

#include "wheelsieve/errors.hpp"

namespace wheelsieve::kernels {

namespace scalar {

uint64_t popcount_words(std::span<const uint64_t> words) {
  uint64_t total = 0;
  for (uint64_t w : words) total += static_cast<uint64_t>(std::popcount(w));
  return total;
}

uint64_t count_nonzero_bytes(std::span<const uint8_t> bytes) {
  uint64_t total = 0;
  for (uint8_t b : bytes) total += b != 0;
  return total;
}

uint64_t count_nonzero_u32(std::span<const uint32_t> values) {
  uint64_t total = 0;
  for (uint32_t v : values) total += v != 0;
  return total;
}

}  // namespace scalar

namespace {

struct Vtable {
  uint64_t (*popcount_words)(std::span<const uint64_t>);
  uint64_t (*count_nonzero_bytes)(std::span<const uint8_t>);
  uint64_t (*count_nonzero_u32)(std::span<const uint32_t>);
};

constexpr Vtable kScalar = {&scalar::popcount_words, &scalar::count_nonzero_bytes,
                            &scalar::count_nonzero_u32};

bool backend_available(Backend b) {
  switch (b) {
    case Backend::Scalar: return true;
    case Backend::Avx2:
#if defined(__x86_64__) || defined(__i386__)
      return __builtin_cpu_supports("avx2") != 0;
#else
      return false;
#endif
    case Backend::Neon:
#if defined(__aarch64__)
      return true;
#else
      return false;
#endif
  }
  return false;
}

Backend detect_backend() {
  if (backend_available(Backend::Avx2)) return Backend::Avx2;
  if (backend_available(Backend::Neon)) return Backend::Neon;
  return Backend::Scalar;
}

Vtable vtable_for(Backend b) {
  switch (b) {
#if defined(__x86_64__) || defined(__i386__)
    case Backend::Avx2:
      return {&avx2::popcount_words, &avx2::count_nonzero_bytes, &avx2::count_nonzero_u32};
#endif
#if defined(__aarch64__)
    case Backend::Neon:
      return {&neon::popcount_words, &neon::count_nonzero_bytes, &neon::count_nonzero_u32};
#endif
    default: return kScalar;
  }
}

struct Dispatch {
  Backend backend;
  Vtable vtable;
  Dispatch() : backend(detect_backend()), vtable(vtable_for(backend)) {}
};

Dispatch g_dispatch;

}  // namespace

Backend active_backend() { return g_dispatch.backend; }

const char* backend_name(Backend b) {
  switch (b) {
    case Backend::Scalar: return "scalar";
    case Backend::Avx2: return "avx2";
    case Backend::Neon: return "neon";
  }
  return "unknown";
}

void force_backend(std::optional<Backend> b) {
  Backend chosen = b.value_or(detect_backend());
  if (!backend_available(chosen))
    throw Error(Errc::Domain,
                std::string("backend ") + backend_name(chosen) + " not available on this cpu");
  g_dispatch.backend = chosen;
  g_dispatch.vtable = vtable_for(chosen);
}

uint64_t popcount_words(std::span<const uint64_t> words) {
  return g_dispatch.vtable.popcount_words(words);
}

uint64_t count_nonzero_bytes(std::span<const uint8_t> bytes) {
  return g_dispatch.vtable.count_nonzero_bytes(bytes);
}

uint64_t count_nonzero_u32(std::span<const uint32_t> values) {
  return g_dispatch.vtable.count_nonzero_u32(values);
}

}  // namespace wheelsieve::kernels
