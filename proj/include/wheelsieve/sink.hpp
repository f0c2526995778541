#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include "wheelsieve/errors.hpp"

namespace wheelsieve {

/// Destination for enumerated primes. Emission order is a hard contract:
/// each batch must be strictly ascending and begin strictly above the last
/// value emitted so far; the base class enforces it and keeps the running
/// count and maximum.
class PrimeSink {
 public:
  virtual ~PrimeSink() = default;

  void emit(std::span<const uint64_t> batch);

  /// Count-only fast path for sinks that do not need the values themselves
  /// (wants_values() false): record `n` primes ending at `largest`.
  void emit_count(uint64_t n, uint64_t largest);

  /// Make everything emitted so far durable (no-op for in-memory sinks).
  virtual void flush() {}

  /// False lets producers skip materializing values entirely.
  virtual bool wants_values() const { return true; }

  uint64_t count() const { return count_; }
  uint64_t largest() const { return largest_; }

 protected:
  virtual void accept(std::span<const uint64_t> batch) = 0;

 private:
  uint64_t count_ = 0;
  uint64_t largest_ = 0;
};

/// Counts primes without storing them.
class CountSink : public PrimeSink {
 public:
  bool wants_values() const override { return false; }

 protected:
  void accept(std::span<const uint64_t>) override {}
};

/// Collects primes into one in-memory vector.
class MemorySink : public PrimeSink {
 public:
  const std::vector<uint64_t>& primes() const { return primes_; }

 protected:
  void accept(std::span<const uint64_t> batch) override {
    primes_.insert(primes_.end(), batch.begin(), batch.end());
  }

 private:
  std::vector<uint64_t> primes_;
};

enum class FileFormat : uint8_t { Text, Binary };

struct ChunkedFileOptions {
  std::filesystem::path dir;
  /// Primes per chunk file before rolling over to the next one.
  uint64_t primes_per_file = 125'000'000;
  FileFormat format = FileFormat::Text;
};

/// Streams primes into numbered chunk files under one directory:
/// primes_00000.txt, primes_00001.txt, ... (.bin for binary), plus a
/// manifest.json recording per file its name, count, min, max and CRC-32,
/// and overall the format, chunk size, total count and the sieved-through
/// frontier. Text files hold one decimal value per line; binary files hold
/// 8-byte little-endian words. The manifest is rewritten at every file
/// rollover and on flush(), so everything it lists is durable.
class ChunkedFileSink : public PrimeSink {
 public:
  explicit ChunkedFileSink(ChunkedFileOptions options);
  ~ChunkedFileSink() override;

  void flush() override;

  /// Record the exclusive bound the producer has fully sieved. Defaults to
  /// one past the largest emitted prime, which makes reads up to and
  /// including that prime valid; a producer that sieved further (and found
  /// nothing after the last prime) should widen it.
  void set_frontier(uint64_t frontier);

  /// Primes covered by the manifest written so far (survives crashes after
  /// the matching flush).
  uint64_t durable_count() const { return durable_count_; }

 protected:
  void accept(std::span<const uint64_t> batch) override;

 private:
  struct FileEntry {
    std::string name;
    uint64_t count;
    uint64_t min;
    uint64_t max;
    uint32_t crc32;
  };

  void open_next_file();
  void close_current_file();
  void write_manifest();
  void append_values(std::span<const uint64_t> values);

  ChunkedFileOptions options_;
  std::vector<FileEntry> closed_;
  std::ofstream out_;
  bool file_open_ = false;
  std::string current_name_;
  uint64_t current_count_ = 0;
  uint64_t current_min_ = 0;
  uint64_t current_max_ = 0;
  uint32_t current_crc_ = 0;
  uint64_t next_seq_ = 0;
  uint64_t frontier_ = 0;
  bool frontier_set_ = false;
  uint64_t durable_count_ = 0;
};

/// Read primes in [lo, hi) back from a chunk directory. Every file touched
/// is verified against its manifest CRC-32 and count before any value is
/// returned. An empty range yields an empty vector; otherwise hi may not
/// exceed the recorded frontier (Errc::BeyondFrontier).
std::vector<uint64_t> read_back(const std::filesystem::path& dir, uint64_t lo, uint64_t hi);

/// Verify every chunk file in the directory against the manifest (CRC-32,
/// counts, min/max, global ascending order). Throws on the first mismatch.
void verify_store(const std::filesystem::path& dir);

}  // namespace wheelsieve
