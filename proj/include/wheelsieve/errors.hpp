#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace wheelsieve {

enum class Errc : uint8_t {
  NotOnWheel,       // value is 0, 2, 3 or 4 mod 6
  Overflow,         // arithmetic would exceed the 64-bit word
  EmptyRange,       // sieve bound below the first prime
  Capacity,         // naive sieve asked for more than its dense-array cap
  Domain,           // argument outside an operation's domain
  Alignment,        // segment start is not a multiple of 6
  BadConfig,        // invalid sieve configuration
  IncompleteBase,   // base store lacks primes required for a segment
  Ordering,         // sink batch not strictly ascending past the last emit
  Io,               // file write or read failure
  BadManifest,      // missing or inconsistent manifest.json
  ChecksumMismatch, // stored file does not match its recorded CRC-32
  BeyondFrontier,   // read range extends past the sieved bound
};

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace wheelsieve
