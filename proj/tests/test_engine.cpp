#include <doctest.h>

#include <atomic>

#include "wheelsieve/engine.hpp"
#include "wheelsieve/wheel.hpp"

using namespace wheelsieve;

namespace {

std::vector<uint64_t> run_collect(uint64_t limit, unsigned threads, uint64_t span,
                                  FlagWidth width = FlagWidth::Bit, bool spawn = false) {
  MemorySink sink;
  SieveConfig config{limit, threads, round_segment_span(span, threads), width, &sink, spawn};
  run(config);
  return sink.primes();
}

// Sets the stop flag from inside the first accepted batch, so the engine
// finishes exactly the iteration that is emitting when the request lands.
class StopRequestingSink : public MemorySink {
 public:
  explicit StopRequestingSink(std::atomic<bool>& stop) : stop_(stop) {}

 protected:
  void accept(std::span<const uint64_t> batch) override {
    MemorySink::accept(batch);
    stop_.store(true, std::memory_order_relaxed);
  }

 private:
  std::atomic<bool>& stop_;
};

// Fails with an I/O error on the first batch reaching past 100, after
// accepting everything before it.
class FailingSink : public MemorySink {
 protected:
  void accept(std::span<const uint64_t> batch) override {
    if (!batch.empty() && batch.back() >= 100)
      throw Error(Errc::Io, "disk full");
    MemorySink::accept(batch);
  }
};

}  // namespace

TEST_CASE("round_segment_span rounds up to a tileable multiple") {
  CHECK(round_segment_span(6000, 1) == 6000);
  CHECK(round_segment_span(6000, 2) == 6000);
  CHECK(round_segment_span(6000, 3) == 6012);
  CHECK(round_segment_span(600000, 3) == 600012);
  CHECK(round_segment_span(6000, 8) == 6000);  // 48 divides 6000 already
  CHECK(round_segment_span(6001, 8) == 6048);
  CHECK(round_segment_span(0, 4) == 24);
  CHECK(round_segment_span(1, 1) == 6);
  try {
    round_segment_span(UINT64_MAX, 1000);
    FAIL("expected overflow error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::Overflow);
  }
  try {
    round_segment_span(6000, 0);
    FAIL("expected bad-config error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::BadConfig);
  }
}

TEST_CASE("plan_iteration tiles iterations into equal worker ranges") {
  SieveConfig config;
  config.segment_span = 6000;
  config.threads = 5;
  const auto plan = plan_iteration(config, 2);
  REQUIRE(plan.size() == 5);
  CHECK(plan[0] == WorkerAssignment{2, 0, 12000, 13200});
  CHECK(plan[2] == WorkerAssignment{2, 2, 14400, 15600});
  CHECK(plan[4] == WorkerAssignment{2, 4, 16800, 18000});
  for (size_t j = 1; j < plan.size(); ++j) CHECK(plan[j].lo == plan[j - 1].hi);

  config.segment_span = 60;
  config.threads = 10;
  const auto small = plan_iteration(config, 3);
  REQUIRE(small.size() == 10);
  CHECK(small.front().lo == 180);
  CHECK(small.back().hi == 240);
  for (const auto& tile : small) {
    CHECK(tile.hi - tile.lo == 6);
    CHECK(tile.lo % 6 == 0);
  }
}

TEST_CASE("plan_iteration validates config and range") {
  SieveConfig config;
  config.segment_span = 6000;
  config.threads = 7;  // 6000 is not a multiple of 42
  try {
    plan_iteration(config, 0);
    FAIL("expected bad-config error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::BadConfig);
  }
  config.threads = 1;
  try {
    plan_iteration(config, kMaxSegmentEnd / 6000);
    FAIL("expected overflow error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::Overflow);
  }
  plan_iteration(config, kMaxSegmentEnd / 6000 - 1);  // last valid iteration
}

TEST_CASE("tiny limits emit exactly the right primes") {
  CHECK(run_collect(2, 1, 6000) == std::vector<uint64_t>{2});
  CHECK(run_collect(3, 1, 6000) == std::vector<uint64_t>{2, 3});
  CHECK(run_collect(4, 1, 6000) == std::vector<uint64_t>{2, 3});
  CHECK(run_collect(5, 1, 6000) == std::vector<uint64_t>{2, 3, 5});
  CHECK(run_collect(30, 1, 6000) == naive_sieve(30));
  CHECK(run_collect(29, 1, 6000) == naive_sieve(30));
}

TEST_CASE("limits below 2 are an empty range") {
  MemorySink sink;
  for (uint64_t limit : {uint64_t{0}, uint64_t{1}}) {
    try {
      run({limit, 1, 6000, FlagWidth::Bit, &sink});
      FAIL("expected empty-range error");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::EmptyRange);
    }
  }
}

TEST_CASE("a bounded run reports exact totals") {
  MemorySink sink;
  const SieveReport report = run({1'000'000, 2, 600000, FlagWidth::Bit, &sink});
  CHECK(report.prime_count == 78498);
  CHECK(report.largest_prime == 999983);
  CHECK(report.iterations == 2);  // limit_end 1000002 over span 600000
  CHECK(report.sieved_to == 1'000'001);
  CHECK(!report.stopped);
  CHECK(!report.overflowed);
  CHECK(report.wall_ms >= 0.0);
  CHECK(sink.primes().size() == 78498);
  CHECK(sink.primes() == naive_sieve(1'000'000));
}

TEST_CASE("flag accounting reports a third of the span in entries") {
  const auto report_for = [](FlagWidth width, unsigned threads) {
    CountSink sink;
    return run({10'000, threads, 6000, width, &sink});
  };
  CHECK(report_for(FlagWidth::Bit, 1).peak_flag_entries == 2000);
  CHECK(report_for(FlagWidth::Bit, 1).peak_flag_bytes == 250);
  CHECK(report_for(FlagWidth::Byte, 1).peak_flag_bytes == 2000);
  CHECK(report_for(FlagWidth::Word4, 1).peak_flag_bytes == 8000);
  // The per-iteration total is the same no matter how many workers split it.
  CHECK(report_for(FlagWidth::Bit, 4).peak_flag_entries == 2000);
}

TEST_CASE("thread count, segment span, width and spawn mode never change the output") {
  const std::vector<uint64_t> reference = naive_sieve(10'000);
  for (unsigned threads : {1u, 2u, 3u, 8u}) {
    for (uint64_t span : {uint64_t{6000}, uint64_t{60000}}) {
      CHECK(run_collect(10'000, threads, span) == reference);
    }
  }
  CHECK(run_collect(10'000, 2, 6000, FlagWidth::Byte) == reference);
  CHECK(run_collect(10'000, 2, 6000, FlagWidth::Word4) == reference);
  CHECK(run_collect(10'000, 4, 6000, FlagWidth::Bit, true) == reference);
}

TEST_CASE("a count-only run matches the value run") {
  CountSink counter;
  const SieveReport report = run({123'456, 3, round_segment_span(6000, 3), FlagWidth::Bit,
                                  &counter});
  CHECK(report.prime_count == 11601);
  CHECK(report.largest_prime == 123'449);
  CHECK(counter.count() == 11601);
  CHECK(counter.largest() == 123'449);
}

TEST_CASE("invalid configurations are rejected up front") {
  MemorySink sink;
  try {
    run({1000, 1, 6000, FlagWidth::Bit, nullptr});
    FAIL("expected bad-config error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::BadConfig);
  }
  try {
    run({1000, 0, 6000, FlagWidth::Bit, &sink});
    FAIL("expected bad-config error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::BadConfig);
  }
  try {
    run({1000, 3, 6000, FlagWidth::Bit, &sink});  // span not tileable by 18
    FAIL("expected bad-config error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::BadConfig);
  }
  try {
    SieveConfig config{1000, 2000, 6'000'000, FlagWidth::Bit, &sink};
    run(config);  // above the default thread cap
    FAIL("expected bad-config error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::BadConfig);
  }
  try {
    run({std::nullopt, 1, 6000, FlagWidth::Bit, &sink});
    FAIL("expected bad-config error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::BadConfig);
  }
  std::atomic<bool> stop{false};
  try {
    run_unbounded({1000, 1, 6000, FlagWidth::Bit, &sink}, stop);
    FAIL("expected bad-config error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::BadConfig);
  }
}

TEST_CASE("a sink failure carries the partial totals") {
  FailingSink sink;
  try {
    run({10'000, 1, 96, FlagWidth::Bit, &sink});
    FAIL("expected sink failure");
  } catch (const SinkFailure& e) {
    CHECK(e.code() == Errc::Io);
    CHECK(e.partial().prime_count == 24);  // everything below 96 went through
    CHECK(e.partial().largest_prime == 89);
    CHECK(sink.primes() == naive_sieve(96));
  }
}

TEST_CASE("an unbounded run honors a stop requested before the start") {
  CountSink counter;
  std::atomic<bool> stop{true};
  const SieveReport report =
      run_unbounded({std::nullopt, 1, 6000, FlagWidth::Bit, &counter}, stop);
  CHECK(report.stopped);
  CHECK(!report.overflowed);
  CHECK(report.prime_count == 0);
  CHECK(report.iterations == 0);
}

TEST_CASE("a stop request lets the current iteration finish emitting") {
  std::atomic<bool> stop{false};
  StopRequestingSink sink(stop);
  const SieveReport report =
      run_unbounded({std::nullopt, 1, 6000, FlagWidth::Bit, &sink}, stop);
  CHECK(report.stopped);
  CHECK(report.iterations == 1);
  CHECK(report.prime_count == 783);
  CHECK(report.largest_prime == 5987);
  CHECK(report.sieved_to == 6000);
  CHECK(sink.primes() == naive_sieve(5999));
}

TEST_CASE("unbounded output does not depend on the thread count") {
  std::atomic<bool> stop1{false};
  StopRequestingSink sink1(stop1);
  run_unbounded({std::nullopt, 1, 6000, FlagWidth::Bit, &sink1}, stop1);
  std::atomic<bool> stop4{false};
  StopRequestingSink sink4(stop4);
  run_unbounded({std::nullopt, 4, 6000, FlagWidth::Bit, &sink4}, stop4);
  CHECK(sink1.primes() == sink4.primes());
}

TEST_CASE("back-to-back runs are independent") {
  MemorySink first;
  run({100, 1, 6000, FlagWidth::Bit, &first});
  MemorySink second;
  run({100, 1, 6000, FlagWidth::Bit, &second});
  CHECK(first.primes() == second.primes());
}
