#include "wheelsieve/engine.hpp"

#include <algorithm>
#include <chrono>
#include <condition_variable>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>

#include "wheelsieve/base_store.hpp"
#include "wheelsieve/wheel.hpp"

namespace wheelsieve {

namespace {

// Reusable fixed-size pool: the orchestrator publishes one body per round,
// every worker runs it once with its own index, and the round ends when all
// have finished (the iteration barrier). The first exception of a round is
// rethrown on the orchestrator thread.
class WorkerPool {
 public:
  explicit WorkerPool(unsigned n) {
    threads_.reserve(n);
    for (unsigned j = 0; j < n; ++j)
      threads_.emplace_back([this, j] { worker_loop(j); });
  }

  ~WorkerPool() {
    {
      std::lock_guard<std::mutex> lk(mutex_);
      shutdown_ = true;
    }
    work_cv_.notify_all();
    for (std::thread& th : threads_) th.join();
  }

  void run_round(const std::function<void(unsigned)>& body) {
    {
      std::lock_guard<std::mutex> lk(mutex_);
      body_ = &body;
      remaining_ = static_cast<unsigned>(threads_.size());
      ++generation_;
    }
    work_cv_.notify_all();
    std::unique_lock<std::mutex> lk(mutex_);
    done_cv_.wait(lk, [this] { return remaining_ == 0; });
    body_ = nullptr;
    if (error_) {
      std::exception_ptr error = std::exchange(error_, nullptr);
      lk.unlock();
      std::rethrow_exception(error);
    }
  }

 private:
  void worker_loop(unsigned j) {
    uint64_t seen = 0;
    for (;;) {
      const std::function<void(unsigned)>* body = nullptr;
      {
        std::unique_lock<std::mutex> lk(mutex_);
        work_cv_.wait(lk, [&] { return shutdown_ || generation_ != seen; });
        if (shutdown_) return;
        seen = generation_;
        body = body_;
      }
      try {
        (*body)(j);
      } catch (...) {
        std::lock_guard<std::mutex> lk(mutex_);
        if (!error_) error_ = std::current_exception();
      }
      {
        std::lock_guard<std::mutex> lk(mutex_);
        if (--remaining_ == 0) done_cv_.notify_one();
      }
    }
  }

  std::vector<std::thread> threads_;
  std::mutex mutex_;
  std::condition_variable work_cv_;
  std::condition_variable done_cv_;
  const std::function<void(unsigned)>* body_ = nullptr;
  unsigned remaining_ = 0;
  uint64_t generation_ = 0;
  bool shutdown_ = false;
  std::exception_ptr error_;
};

// One-shot round with freshly spawned threads (--spawn-per-iteration).
void spawn_round(unsigned threads, const std::function<void(unsigned)>& body) {
  std::vector<std::thread> round;
  round.reserve(threads);
  std::mutex mutex;
  std::exception_ptr error;
  for (unsigned j = 0; j < threads; ++j)
    round.emplace_back([&, j] {
      try {
        body(j);
      } catch (...) {
        std::lock_guard<std::mutex> lk(mutex);
        if (!error) error = std::current_exception();
      }
    });
  for (std::thread& th : round) th.join();
  if (error) std::rethrow_exception(error);
}

struct WorkerResult {
  std::vector<uint64_t> values;
  uint64_t count = 0;
  uint64_t largest = 0;
  bool extracted = false;
};

void validate_config(const SieveConfig& config, bool bounded) {
  if (config.sink == nullptr)
    throw Error(Errc::BadConfig, "config has no sink");
  if (config.threads == 0)
    throw Error(Errc::BadConfig, "thread count must be positive");
  if (config.threads > config.thread_cap)
    throw Error(Errc::BadConfig, "thread count " + std::to_string(config.threads) +
                                     " exceeds the cap " + std::to_string(config.thread_cap));
  const uint64_t align = 6ull * config.threads;
  if (config.segment_span == 0 || config.segment_span % align != 0)
    throw Error(Errc::BadConfig, "segment span " + std::to_string(config.segment_span) +
                                     " is not a positive multiple of " + std::to_string(align));
  if (config.segment_span > kMaxSegmentEnd)
    throw Error(Errc::BadConfig, "segment span exceeds the 64-bit value range");
  if (bounded) {
    if (!config.limit)
      throw Error(Errc::BadConfig, "bounded run requires a limit");
    if (*config.limit < 2)
      throw Error(Errc::EmptyRange, "no primes below 2");
    if (*config.limit > kMaxSegmentEnd - 1)
      throw Error(Errc::Overflow, "limit exceeds the sievable 64-bit range");
  } else if (config.limit) {
    throw Error(Errc::BadConfig, "unbounded run cannot take a limit");
  }
}

uint64_t saturating_double(uint64_t v) {
  return v > UINT64_MAX / 2 ? UINT64_MAX : 2 * v;
}

SieveReport run_loop(const SieveConfig& config, const std::atomic<bool>* stop) {
  validate_config(config, stop == nullptr);
  PrimeSink& sink = *config.sink;
  const bool bounded = stop == nullptr;
  const unsigned threads = config.threads;
  const uint64_t span = config.segment_span;
  const uint64_t sub_span = span / threads;

  const uint64_t limit = bounded ? *config.limit : 0;
  // Smallest multiple of 6 strictly above the limit: the final iteration
  // sieves up to here and trims values beyond the limit afterwards.
  const uint64_t limit_end = bounded ? (limit / 6 + 1) * 6 : kMaxSegmentEnd;
  const uint64_t sqrt_limit = bounded ? isqrt(limit) : 0;
  const uint64_t total_iterations =
      bounded ? limit_end / span + (limit_end % span != 0) : 0;

  SieveReport report;
  const auto started = std::chrono::steady_clock::now();
  const auto finish_clock = [&] {
    report.wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started)
            .count();
  };

  // Seed with just enough naive-sieved primes for the first iteration; the
  // hint is capped because only its square root is ever materialized.
  const uint64_t hint = std::min<uint64_t>(bounded ? std::min(span, limit) : span,
                                           uint64_t{1} << 40);
  BasePrimeStore base = BasePrimeStore::bootstrap(std::max<uint64_t>(25, hint));

  std::vector<WorkerResult> results(threads);
  std::optional<WorkerPool> pool;
  if (threads > 1 && !config.spawn_per_iteration) pool.emplace(threads);

  const bool want_values = sink.wants_values();
  bool prelude_pending = true;

  for (uint64_t i = 0, seg_lo = 0;; ++i, seg_lo += span) {
    if (bounded && i >= total_iterations) break;
    if (stop && stop->load(std::memory_order_acquire)) {
      report.stopped = true;
      break;
    }
    if (!bounded && seg_lo > kMaxSegmentEnd - span) {
      report.overflowed = true;
      break;
    }
    const uint64_t seg_hi =
        (bounded && span > limit_end - seg_lo) ? limit_end : seg_lo + span;

    // How far the base store should reach after this iteration. Bounded
    // runs chase sqrt(limit); unbounded runs pre-extend for the next
    // iteration, at least doubling so growth stays amortized.
    uint64_t absorb_to = base.frontier();
    if (bounded) {
      absorb_to = std::max(absorb_to, std::min(sqrt_limit, seg_hi - 1));
    } else {
      const uint64_t next_end =
          span > kMaxSegmentEnd - seg_hi ? kMaxSegmentEnd : seg_hi + span;
      const uint64_t wanted = std::max(isqrt(next_end - 1), saturating_double(base.frontier()));
      absorb_to = std::max(absorb_to, std::min(seg_hi - 1, wanted));
    }
    // New base primes come from this iteration's own output when the gap
    // starts inside it; once iterations have moved past the frontier, the
    // store re-sieves the gap itself instead.
    const bool absorbing = absorb_to > base.frontier() && base.frontier() + 1 >= seg_lo;
    if (!absorbing && absorb_to > base.frontier()) base.extend(absorb_to);
    base.extend(isqrt(seg_hi - 1));  // no-op unless the growth policy fell behind

    // Analytic flag-storage accounting for this iteration.
    uint64_t iter_entries = 0;
    uint64_t iter_bytes = 0;
    for (unsigned j = 0; j < threads; ++j) {
      const uint64_t lo = seg_lo + j * sub_span;
      if (lo >= seg_hi) break;
      const uint64_t hi = sub_span > seg_hi - lo ? seg_hi : lo + sub_span;
      const uint64_t len = (hi - lo) / 6;
      iter_entries += 2 * len;
      iter_bytes += 2 * flag_payload_bytes(len, config.flag_width);
    }
    report.peak_flag_entries = std::max(report.peak_flag_entries, iter_entries);
    report.peak_flag_bytes = std::max(report.peak_flag_bytes, iter_bytes);

    const uint64_t frontier_before = base.frontier();
    const auto body = [&](unsigned j) {
      WorkerResult& r = results[j];
      r.values.clear();
      r.count = 0;
      r.largest = 0;
      r.extracted = false;
      const uint64_t lo = seg_lo + j * sub_span;
      if (lo >= seg_hi) return;
      const uint64_t hi = sub_span > seg_hi - lo ? seg_hi : lo + sub_span;
      SegmentBitmap segment(lo, (hi - lo) / 6, config.flag_width);
      sieve_segment(segment, base);
      if (lo == 0) segment.clear_value(1);  // index 0 of the 6k+1 class is not prime
      if (bounded && segment.end_value() > limit) segment.clear_values_above(limit);
      if (want_values || (absorbing && lo <= absorb_to)) {
        r.values = segment.surviving();
        r.count = r.values.size();
        if (!r.values.empty()) r.largest = r.values.back();
        r.extracted = true;
      } else {
        r.count = segment.count_surviving();
        r.largest = segment.last_surviving().value_or(0);
      }
    };

    if (config.spawn_per_iteration)
      spawn_round(threads, body);
    else if (threads == 1)
      body(0);
    else
      pool->run_round(body);

    // Barrier passed: emit in worker order so the output stream is
    // ascending and identical for every thread count.
    std::vector<uint64_t> found;
    try {
      if (prelude_pending) {
        prelude_pending = false;
        static constexpr uint64_t kPrelude[2] = {2, 3};
        const size_t n = (!bounded || limit >= 3) ? 2 : 1;
        if (want_values)
          sink.emit({kPrelude, n});
        else
          sink.emit_count(n, kPrelude[n - 1]);
      }
      for (unsigned j = 0; j < threads; ++j) {
        const WorkerResult& r = results[j];
        if (r.count == 0) continue;
        if (r.extracted && want_values)
          sink.emit(r.values);
        else
          sink.emit_count(r.count, r.largest);
        if (absorbing) {
          auto from = std::upper_bound(r.values.begin(), r.values.end(), frontier_before);
          auto to = std::upper_bound(from, r.values.end(), absorb_to);
          found.insert(found.end(), from, to);
        }
      }
    } catch (const Error& e) {
      report.prime_count = sink.count();
      report.largest_prime = sink.largest();
      finish_clock();
      throw SinkFailure(e.code(), e.what(), report);
    }
    if (absorbing) base.absorb(found, absorb_to);

    report.iterations = i + 1;
    report.sieved_to = seg_hi;
  }

  if (bounded) report.sieved_to = limit + 1;
  report.prime_count = sink.count();
  report.largest_prime = sink.largest();
  finish_clock();
  return report;
}

}  // namespace

uint64_t round_segment_span(uint64_t span, unsigned threads) {
  if (threads == 0)
    throw Error(Errc::BadConfig, "thread count must be positive");
  const uint64_t align = 6ull * threads;
  if (span == 0) return align;
  if (span % align == 0) return span;
  if (span > UINT64_MAX - align)
    throw Error(Errc::Overflow, "segment span exceeds the 64-bit value range");
  return (span / align + 1) * align;
}

std::vector<WorkerAssignment> plan_iteration(const SieveConfig& config, uint64_t iteration) {
  if (config.threads == 0 || config.threads > config.thread_cap)
    throw Error(Errc::BadConfig, "invalid thread count");
  const uint64_t span = config.segment_span;
  const uint64_t align = 6ull * config.threads;
  if (span == 0 || span % align != 0 || span > kMaxSegmentEnd)
    throw Error(Errc::BadConfig, "segment span " + std::to_string(span) +
                                     " is not a positive multiple of " + std::to_string(align));
  if (iteration > kMaxSegmentEnd / span - 1)
    throw Error(Errc::Overflow, "iteration " + std::to_string(iteration) +
                                    " leaves the 64-bit value range");
  const uint64_t sub_span = span / config.threads;
  const uint64_t seg_lo = iteration * span;
  std::vector<WorkerAssignment> plan;
  plan.reserve(config.threads);
  for (unsigned j = 0; j < config.threads; ++j) {
    const uint64_t lo = seg_lo + j * sub_span;
    plan.push_back({iteration, j, lo, lo + sub_span});
  }
  return plan;
}

SieveReport run(const SieveConfig& config) { return run_loop(config, nullptr); }

SieveReport run_unbounded(const SieveConfig& config, const std::atomic<bool>& stop) {
  return run_loop(config, &stop);
}

}  // namespace wheelsieve
