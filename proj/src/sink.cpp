#include "wheelsieve/sink.hpp"

#include <zlib.h>

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <utility>

#include <json.hpp>

namespace wheelsieve {

void PrimeSink::emit(std::span<const uint64_t> batch) {
  if (batch.empty()) return;
  uint64_t prev = largest_;
  for (uint64_t v : batch) {
    if (v <= prev)
      throw Error(Errc::Ordering, "emit batch not strictly ascending past " +
                                      std::to_string(prev) + " (got " + std::to_string(v) + ")");
    prev = v;
  }
  accept(batch);
  count_ += batch.size();
  largest_ = batch.back();
}

void PrimeSink::emit_count(uint64_t n, uint64_t largest) {
  if (n == 0) return;
  if (wants_values())
    throw Error(Errc::Domain, "sink needs the values; count-only emission not possible");
  if (largest <= largest_)
    throw Error(Errc::Ordering, "count batch ends at " + std::to_string(largest) +
                                    ", not above " + std::to_string(largest_));
  count_ += n;
  largest_ = largest;
}

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

const char* extension_for(FileFormat format) {
  return format == FileFormat::Text ? "txt" : "bin";
}

std::string chunk_name(uint64_t seq, FileFormat format) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "primes_%05llu.%s", static_cast<unsigned long long>(seq),
                extension_for(format));
  return buf;
}

std::string crc_hex(uint32_t crc) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%08x", crc);
  return buf;
}

uint32_t crc_of(const std::string& bytes) {
  return static_cast<uint32_t>(
      ::crc32(0, reinterpret_cast<const Bytef*>(bytes.data()), static_cast<uInt>(bytes.size())));
}

void encode_values(std::string& out, std::span<const uint64_t> values, FileFormat format) {
  if (format == FileFormat::Text) {
    char digits[24];
    for (uint64_t v : values) {
      auto [end, ec] = std::to_chars(digits, digits + sizeof digits, v);
      out.append(digits, end);
      out.push_back('\n');
    }
  } else {
    for (uint64_t v : values)
      for (int shift = 0; shift < 64; shift += 8)
        out.push_back(static_cast<char>((v >> shift) & 0xff));
  }
}

std::vector<uint64_t> decode_values(const std::string& bytes, FileFormat format,
                                    const std::string& name) {
  std::vector<uint64_t> values;
  if (format == FileFormat::Text) {
    const char* p = bytes.data();
    const char* end = p + bytes.size();
    while (p < end) {
      uint64_t v = 0;
      auto [next, ec] = std::from_chars(p, end, v);
      if (ec != std::errc{} || next == end || *next != '\n')
        throw Error(Errc::BadManifest, "chunk file " + name + " is not well-formed text");
      values.push_back(v);
      p = next + 1;
    }
  } else {
    if (bytes.size() % 8 != 0)
      throw Error(Errc::BadManifest, "chunk file " + name + " is not a whole number of words");
    for (size_t i = 0; i < bytes.size(); i += 8) {
      uint64_t v = 0;
      for (int b = 7; b >= 0; --b)
        v = (v << 8) | static_cast<uint8_t>(bytes[i + static_cast<size_t>(b)]);
      values.push_back(v);
    }
  }
  return values;
}

struct Manifest {
  FileFormat format;
  uint64_t primes_per_file;
  uint64_t frontier;
  uint64_t total_count;
  struct File {
    std::string name;
    uint64_t count, min, max;
    uint32_t crc32;
  };
  std::vector<File> files;
};

Manifest load_manifest(const fs::path& dir) {
  std::ifstream in(dir / "manifest.json", std::ios::binary);
  if (!in)
    throw Error(Errc::BadManifest, "no manifest.json under " + dir.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error(Errc::BadManifest, std::string("manifest.json unreadable: ") + e.what());
  }
  Manifest m;
  try {
    const std::string format = j.at("format").get<std::string>();
    if (format == "text")
      m.format = FileFormat::Text;
    else if (format == "binary")
      m.format = FileFormat::Binary;
    else
      throw Error(Errc::BadManifest, "unknown format '" + format + "' in manifest");
    m.primes_per_file = j.at("primes_per_file").get<uint64_t>();
    m.frontier = j.at("frontier").get<uint64_t>();
    m.total_count = j.at("total_count").get<uint64_t>();
    for (const json& f : j.at("files")) {
      Manifest::File entry;
      entry.name = f.at("name").get<std::string>();
      entry.count = f.at("count").get<uint64_t>();
      entry.min = f.at("min").get<uint64_t>();
      entry.max = f.at("max").get<uint64_t>();
      const std::string crc = f.at("crc32").get<std::string>();
      entry.crc32 = static_cast<uint32_t>(std::stoul(crc, nullptr, 16));
      m.files.push_back(std::move(entry));
    }
  } catch (const json::exception& e) {
    throw Error(Errc::BadManifest, std::string("manifest.json incomplete: ") + e.what());
  } catch (const std::logic_error& e) {
    throw Error(Errc::BadManifest, std::string("manifest.json malformed: ") + e.what());
  }
  return m;
}

std::vector<uint64_t> load_and_verify_file(const fs::path& dir, const Manifest::File& entry,
                                           FileFormat format) {
  std::ifstream in(dir / entry.name, std::ios::binary);
  if (!in)
    throw Error(Errc::BadManifest, "manifest lists missing chunk file " + entry.name);
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (!in.good() && !in.eof())
    throw Error(Errc::Io, "failed reading chunk file " + entry.name);
  if (crc_of(bytes) != entry.crc32)
    throw Error(Errc::ChecksumMismatch, "chunk file " + entry.name +
                                            " does not match its recorded crc32 " +
                                            crc_hex(entry.crc32));
  std::vector<uint64_t> values = decode_values(bytes, format, entry.name);
  if (values.size() != entry.count)
    throw Error(Errc::BadManifest, "chunk file " + entry.name + " holds " +
                                       std::to_string(values.size()) + " values, manifest says " +
                                       std::to_string(entry.count));
  return values;
}

}  // namespace

ChunkedFileSink::ChunkedFileSink(ChunkedFileOptions options) : options_(std::move(options)) {
  if (options_.primes_per_file == 0)
    throw Error(Errc::Domain, "primes_per_file must be positive");
  std::error_code ec;
  fs::create_directories(options_.dir, ec);
  if (ec)
    throw Error(Errc::Io, "cannot create output directory " + options_.dir.string() + ": " +
                              ec.message());
}

ChunkedFileSink::~ChunkedFileSink() {
  try {
    flush();
  } catch (...) {
    // Destructor cleanup is best-effort; callers who need the manifest
    // guarantee call flush() themselves and see the error there.
  }
}

void ChunkedFileSink::open_next_file() {
  current_name_ = chunk_name(next_seq_++, options_.format);
  out_.open(options_.dir / current_name_, std::ios::binary | std::ios::trunc);
  if (!out_)
    throw Error(Errc::Io, "cannot open chunk file " + current_name_ + " (" +
                              std::to_string(durable_count_) + " primes durable)");
  file_open_ = true;
  current_count_ = 0;
  current_min_ = 0;
  current_max_ = 0;
  current_crc_ = 0;
}

void ChunkedFileSink::append_values(std::span<const uint64_t> values) {
  if (values.empty()) return;
  std::string buffer;
  buffer.reserve(values.size() * (options_.format == FileFormat::Text ? 12 : 8));
  encode_values(buffer, values, options_.format);
  current_crc_ = static_cast<uint32_t>(::crc32(
      current_crc_, reinterpret_cast<const Bytef*>(buffer.data()), static_cast<uInt>(buffer.size())));
  out_.write(buffer.data(), static_cast<std::streamsize>(buffer.size()));
  if (!out_)
    throw Error(Errc::Io, "write to " + current_name_ + " failed (" +
                              std::to_string(durable_count_) + " primes durable)");
  if (current_count_ == 0) current_min_ = values.front();
  current_max_ = values.back();
  current_count_ += values.size();
}

void ChunkedFileSink::close_current_file() {
  if (!file_open_) return;
  out_.close();
  if (out_.fail())
    throw Error(Errc::Io, "closing " + current_name_ + " failed (" +
                              std::to_string(durable_count_) + " primes durable)");
  closed_.push_back({current_name_, current_count_, current_min_, current_max_, current_crc_});
  file_open_ = false;
  write_manifest();
}

void ChunkedFileSink::write_manifest() {
  json j;
  j["format"] = options_.format == FileFormat::Text ? "text" : "binary";
  j["primes_per_file"] = options_.primes_per_file;
  uint64_t total = 0;
  json files = json::array();
  for (const FileEntry& f : closed_) {
    total += f.count;
    files.push_back({{"name", f.name},
                     {"count", f.count},
                     {"min", f.min},
                     {"max", f.max},
                     {"crc32", crc_hex(f.crc32)}});
  }
  j["files"] = std::move(files);
  j["total_count"] = total;
  uint64_t frontier = frontier_;
  if (!frontier_set_) frontier = largest() == 0 ? 0 : largest() + 1;
  j["frontier"] = frontier;

  // Write-then-rename keeps the previous manifest intact if this write dies.
  const fs::path final_path = options_.dir / "manifest.json";
  const fs::path tmp_path = options_.dir / "manifest.json.tmp";
  {
    std::ofstream out(tmp_path, std::ios::binary | std::ios::trunc);
    out << j.dump(2) << '\n';
    if (!out)
      throw Error(Errc::Io, "writing manifest failed (" + std::to_string(durable_count_) +
                                " primes durable)");
  }
  std::error_code ec;
  fs::rename(tmp_path, final_path, ec);
  if (ec)
    throw Error(Errc::Io, "replacing manifest failed: " + ec.message());
  durable_count_ = total;
}

void ChunkedFileSink::accept(std::span<const uint64_t> batch) {
  while (!batch.empty()) {
    if (!file_open_) open_next_file();
    const uint64_t room = options_.primes_per_file - current_count_;
    const size_t take = static_cast<size_t>(std::min<uint64_t>(room, batch.size()));
    append_values(batch.first(take));
    batch = batch.subspan(take);
    if (current_count_ == options_.primes_per_file) close_current_file();
  }
}

void ChunkedFileSink::flush() {
  if (file_open_)
    close_current_file();
  else
    write_manifest();
}

void ChunkedFileSink::set_frontier(uint64_t frontier) {
  if (frontier <= largest() && largest() != 0)
    throw Error(Errc::Domain, "frontier " + std::to_string(frontier) +
                                  " does not cover the emitted prime " +
                                  std::to_string(largest()));
  frontier_ = frontier;
  frontier_set_ = true;
}

std::vector<uint64_t> read_back(const std::filesystem::path& dir, uint64_t lo, uint64_t hi) {
  if (lo >= hi) return {};
  const Manifest m = load_manifest(dir);
  if (hi > m.frontier)
    throw Error(Errc::BeyondFrontier, "read up to " + std::to_string(hi) +
                                          " exceeds the sieved frontier " +
                                          std::to_string(m.frontier));
  std::vector<uint64_t> out;
  for (const Manifest::File& f : m.files) {
    if (f.count == 0 || f.max < lo || f.min >= hi) continue;
    std::vector<uint64_t> values = load_and_verify_file(dir, f, m.format);
    for (uint64_t v : values)
      if (lo <= v && v < hi) out.push_back(v);
  }
  return out;
}

void verify_store(const std::filesystem::path& dir) {
  const Manifest m = load_manifest(dir);
  uint64_t total = 0;
  uint64_t prev = 0;
  for (const Manifest::File& f : m.files) {
    std::vector<uint64_t> values = load_and_verify_file(dir, f, m.format);
    if (!values.empty() && (values.front() != f.min || values.back() != f.max))
      throw Error(Errc::BadManifest, "chunk file " + f.name + " min/max disagree with manifest");
    for (uint64_t v : values) {
      if (v <= prev)
        throw Error(Errc::BadManifest, "stored primes not strictly ascending at " +
                                           std::to_string(v) + " in " + f.name);
      prev = v;
    }
    total += values.size();
  }
  if (total != m.total_count)
    throw Error(Errc::BadManifest, "manifest total_count " + std::to_string(m.total_count) +
                                       " but files hold " + std::to_string(total));
}

}  // namespace wheelsieve
