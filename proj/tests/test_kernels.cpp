#include <doctest.h>

#include <cstring>
#include <random>
#include <vector>

#include "wheelsieve/errors.hpp"
#include "wheelsieve/kernels.hpp"

using namespace wheelsieve;
using namespace wheelsieve::kernels;

TEST_CASE("backend_name covers every backend") {
  CHECK(std::strcmp(backend_name(Backend::Scalar), "scalar") == 0);
  CHECK(std::strcmp(backend_name(Backend::Avx2), "avx2") == 0);
  CHECK(std::strcmp(backend_name(Backend::Neon), "neon") == 0);
}

TEST_CASE("dispatched popcount matches the scalar reference") {
  std::mt19937_64 rng(11);
  // Sizes straddle the vector width so the tail paths get exercised too.
  for (size_t n : {size_t{0}, size_t{1}, size_t{3}, size_t{4}, size_t{7}, size_t{8}, size_t{31},
                   size_t{64}, size_t{1000}, size_t{4097}}) {
    std::vector<uint64_t> words(n);
    for (auto& w : words) w = rng();
    uint64_t expected = 0;
    for (uint64_t w : words) expected += static_cast<uint64_t>(std::popcount(w));
    CHECK(popcount_words(words) == expected);
    CHECK(scalar::popcount_words(words) == expected);
  }

  std::vector<uint64_t> uniform(513, 0);
  CHECK(popcount_words(uniform) == 0);
  std::fill(uniform.begin(), uniform.end(), UINT64_MAX);
  CHECK(popcount_words(uniform) == 513 * 64);
}

TEST_CASE("dispatched byte counting matches the scalar reference") {
  std::mt19937_64 rng(12);
  for (size_t n : {size_t{0}, size_t{1}, size_t{31}, size_t{32}, size_t{33}, size_t{100},
                   size_t{4096}, size_t{10001}}) {
    std::vector<uint8_t> bytes(n);
    for (auto& b : bytes) b = static_cast<uint8_t>(rng() % 3 ? 0 : rng());
    uint64_t expected = 0;
    for (uint8_t b : bytes) expected += b != 0;
    CHECK(count_nonzero_bytes(bytes) == expected);
    CHECK(scalar::count_nonzero_bytes(bytes) == expected);
  }
}

TEST_CASE("dispatched u32 counting matches the scalar reference") {
  std::mt19937_64 rng(13);
  for (size_t n : {size_t{0}, size_t{1}, size_t{7}, size_t{8}, size_t{9}, size_t{250},
                   size_t{4099}}) {
    std::vector<uint32_t> vals(n);
    for (auto& v : vals) v = rng() % 2 ? 0 : static_cast<uint32_t>(rng());
    uint64_t expected = 0;
    for (uint32_t v : vals) expected += v != 0;
    CHECK(count_nonzero_u32(vals) == expected);
    CHECK(scalar::count_nonzero_u32(vals) == expected);
  }
}

#if defined(__x86_64__) || defined(__i386__)
TEST_CASE("the avx2 backend agrees with scalar when present") {
  if (active_backend() != Backend::Avx2) return;  // plain hardware
  std::mt19937_64 rng(15);
  for (size_t n : {size_t{5}, size_t{64}, size_t{1000}, size_t{4097}}) {
    std::vector<uint64_t> words(n);
    for (auto& w : words) w = rng();
    CHECK(avx2::popcount_words(words) == scalar::popcount_words(words));
    std::vector<uint8_t> bytes(8 * n);
    for (auto& b : bytes) b = static_cast<uint8_t>(rng() % 5 ? 0 : 1);
    CHECK(avx2::count_nonzero_bytes(bytes) == scalar::count_nonzero_bytes(bytes));
    std::vector<uint32_t> vals(2 * n);
    for (auto& v : vals) v = rng() % 5 ? 0 : 7;
    CHECK(avx2::count_nonzero_u32(vals) == scalar::count_nonzero_u32(vals));
  }
}
#endif

TEST_CASE("forcing the scalar backend gives identical answers") {
  std::mt19937_64 rng(14);
  std::vector<uint64_t> words(777);
  for (auto& w : words) w = rng();
  std::vector<uint8_t> bytes(2049);
  for (auto& b : bytes) b = static_cast<uint8_t>(rng() % 4 ? 0 : 1);
  std::vector<uint32_t> vals(1025);
  for (auto& v : vals) v = rng() % 4 ? 0 : 9;

  const uint64_t pop_native = popcount_words(words);
  const uint64_t bytes_native = count_nonzero_bytes(bytes);
  const uint64_t u32_native = count_nonzero_u32(vals);

  force_backend(Backend::Scalar);
  CHECK(active_backend() == Backend::Scalar);
  CHECK(popcount_words(words) == pop_native);
  CHECK(count_nonzero_bytes(bytes) == bytes_native);
  CHECK(count_nonzero_u32(vals) == u32_native);

  force_backend(std::nullopt);  // back to auto-detection
  CHECK(popcount_words(words) == pop_native);
}

TEST_CASE("forcing an unavailable backend is rejected") {
  const Backend before = active_backend();
#if defined(__x86_64__) || defined(_M_X64) || defined(__i386__)
  const Backend foreign = Backend::Neon;
#else
  const Backend foreign = Backend::Avx2;
#endif
  try {
    force_backend(foreign);
    FAIL("expected domain error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::Domain);
  }
  CHECK(active_backend() == before);
}
