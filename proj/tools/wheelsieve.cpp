#include <algorithm>
#include <atomic>
#include <charconv>
#include <csignal>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "wheelsieve/engine.hpp"
#include "wheelsieve/sink.hpp"
#include "wheelsieve/wheel.hpp"

namespace {

using namespace wheelsieve;

std::atomic<bool> g_stop{false};
std::atomic<int> g_interrupts{0};

extern "C" void handle_sigint(int) {
  g_stop.store(true);
  // Second interrupt aborts immediately; the first lets the current
  // iteration finish and the summary print.
  if (g_interrupts.fetch_add(1) + 1 >= 2) std::_Exit(130);
}

unsigned default_threads() {
  if (const char* env = std::getenv("WHEELSIEVE_THREADS")) {
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1 && v <= 1024) return static_cast<unsigned>(v);
    std::cerr << "warning: ignoring invalid WHEELSIEVE_THREADS='" << env << "'\n";
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw != 0 ? hw : 1;
}

uint64_t effective_span(uint64_t requested, unsigned threads) {
  const uint64_t span = round_segment_span(requested, threads);
  if (span != requested)
    std::cerr << "warning: segment span rounded up to " << span << " (multiple of 6*"
              << threads << ")\n";
  return span;
}

void note_oversubscription(unsigned threads) {
  const unsigned hw = std::thread::hardware_concurrency();
  if (hw != 0 && threads > hw)
    std::cerr << "note: " << threads << " threads on " << hw
              << " hardware threads (oversubscribed)\n";
}

/// Streams primes to stdout, one decimal per line, with chunky buffering so
/// large runs are not syscall-bound.
class StdoutSink final : public PrimeSink {
 public:
  ~StdoutSink() override { drain(); }
  void flush() override {
    drain();
    std::fflush(stdout);
  }

 protected:
  void accept(std::span<const uint64_t> batch) override {
    char digits[24];
    for (uint64_t v : batch) {
      auto [end, ec] = std::to_chars(digits, digits + sizeof digits, v);
      buffer_.append(digits, static_cast<size_t>(end - digits));
      buffer_.push_back('\n');
    }
    if (buffer_.size() >= (size_t{1} << 20)) drain();
  }

 private:
  void drain() {
    if (buffer_.empty()) return;
    std::fwrite(buffer_.data(), 1, buffer_.size(), stdout);
    buffer_.clear();
  }
  std::string buffer_;
};

const std::map<std::string, FlagWidth> kWidthNames{
    {"bit", FlagWidth::Bit}, {"byte", FlagWidth::Byte}, {"word4", FlagWidth::Word4}};
const std::map<std::string, FileFormat> kFormatNames{{"text", FileFormat::Text},
                                                     {"binary", FileFormat::Binary}};

const char* width_name(FlagWidth w) {
  switch (w) {
    case FlagWidth::Bit: return "bit";
    case FlagWidth::Byte: return "byte";
    case FlagWidth::Word4: return "word4";
  }
  return "?";
}

void print_summary(const SieveReport& report) {
  std::printf("count=%llu largest=%llu ms=%.3f\n",
              static_cast<unsigned long long>(report.prime_count),
              static_cast<unsigned long long>(report.largest_prime), report.wall_ms);
}

struct SieveArgs {
  std::string limit_text;
  unsigned threads = default_threads();
  uint64_t segment = 6'000'000;
  FlagWidth width = FlagWidth::Bit;
  bool count_only = false;
  std::string out_dir;
  FileFormat format = FileFormat::Text;
  uint64_t primes_per_file = 125'000'000;
  bool spawn_per_iteration = false;
};

int cmd_sieve(const SieveArgs& args) {
  const bool unbounded = args.limit_text == "unbounded";
  uint64_t limit = 0;
  if (!unbounded) {
    auto [end, ec] = std::from_chars(args.limit_text.data(),
                                     args.limit_text.data() + args.limit_text.size(), limit);
    if (ec != std::errc{} || end != args.limit_text.data() + args.limit_text.size()) {
      std::cerr << "error: --limit expects an unsigned integer or 'unbounded', got '"
                << args.limit_text << "'\n";
      return 2;
    }
  }
  note_oversubscription(args.threads);

  std::unique_ptr<PrimeSink> sink;
  ChunkedFileSink* file_sink = nullptr;
  if (args.count_only) {
    sink = std::make_unique<CountSink>();
  } else if (!args.out_dir.empty()) {
    auto owned = std::make_unique<ChunkedFileSink>(
        ChunkedFileOptions{args.out_dir, args.primes_per_file, args.format});
    file_sink = owned.get();
    sink = std::move(owned);
  } else {
    sink = std::make_unique<StdoutSink>();
  }

  SieveConfig config;
  config.limit = unbounded ? std::nullopt : std::optional<uint64_t>{limit};
  config.threads = args.threads;
  config.segment_span = effective_span(args.segment, args.threads);
  config.flag_width = args.width;
  config.sink = sink.get();
  config.spawn_per_iteration = args.spawn_per_iteration;

  SieveReport report;
  if (unbounded) {
    std::signal(SIGINT, handle_sigint);
    report = run_unbounded(config, g_stop);
    std::signal(SIGINT, SIG_DFL);
  } else {
    report = run(config);
  }
  if (file_sink != nullptr) file_sink->set_frontier(report.sieved_to);
  sink->flush();
  if (report.overflowed)
    std::cerr << "note: enumeration reached the end of the 64-bit range\n";
  print_summary(report);
  return 0;
}

struct VerifyArgs {
  uint64_t limit = 0;
  unsigned threads = default_threads();
  uint64_t segment = 6'000'000;
  FlagWidth width = FlagWidth::Bit;
  std::optional<uint64_t> poison;
};

int cmd_verify(const VerifyArgs& args) {
  const std::vector<uint64_t> expected = naive_sieve(args.limit);

  MemorySink sink;
  SieveConfig config;
  config.limit = args.limit;
  config.threads = args.threads;
  config.segment_span = effective_span(args.segment, args.threads);
  config.flag_width = args.width;
  config.sink = &sink;
  run(config);

  std::vector<uint64_t> got = sink.primes();
  if (args.poison) {
    // Fault-injection hook for exercising the failure path: drop the given
    // prime from the pipeline output, as a wrongly cleared flag would.
    auto it = std::find(got.begin(), got.end(), *args.poison);
    if (it != got.end()) got.erase(it);
  }

  const size_t common = std::min(expected.size(), got.size());
  size_t divergence = common;
  for (size_t i = 0; i < common; ++i) {
    if (expected[i] != got[i]) {
      divergence = i;
      break;
    }
  }
  if (divergence == common && expected.size() == got.size()) {
    std::printf("PASS count=%zu limit=%llu threads=%u segment=%llu\n", got.size(),
                static_cast<unsigned long long>(args.limit), args.threads,
                static_cast<unsigned long long>(config.segment_span));
    return 0;
  }
  if (divergence < common)
    std::printf("FAIL first divergence at index %zu: expected %llu, got %llu\n", divergence,
                static_cast<unsigned long long>(expected[divergence]),
                static_cast<unsigned long long>(got[divergence]));
  else if (expected.size() > got.size())
    std::printf("FAIL pipeline output ends early at index %zu: expected %llu\n", divergence,
                static_cast<unsigned long long>(expected[divergence]));
  else
    std::printf("FAIL pipeline emitted extra value %llu at index %zu\n",
                static_cast<unsigned long long>(got[divergence]), divergence);
  return 1;
}

struct BenchArgs {
  std::vector<uint64_t> limits;
  std::vector<unsigned> threads{default_threads()};
  std::vector<uint64_t> segments{6'000'000};
  std::vector<std::string> widths{"bit"};
  unsigned repeats = 1;
  std::string csv_path;
};

int cmd_bench(const BenchArgs& args) {
  if (args.repeats == 0) {
    std::cerr << "error: --repeats must be positive\n";
    return 2;
  }
  std::string csv = "threads,limit,segment_span,flag_width,wall_ms,iterations,peak_flag_bytes,prime_count\n";
  std::map<uint64_t, uint64_t> counts_by_limit;

  for (uint64_t limit : args.limits) {
    for (unsigned threads : args.threads) {
      for (uint64_t segment : args.segments) {
        const uint64_t span = round_segment_span(segment, threads);
        for (const std::string& width_text : args.widths) {
          const FlagWidth width = kWidthNames.at(width_text);
          SieveReport best;
          for (unsigned r = 0; r < args.repeats; ++r) {
            CountSink sink;
            SieveConfig config;
            config.limit = limit;
            config.threads = threads;
            config.segment_span = span;
            config.flag_width = width;
            config.sink = &sink;
            SieveReport report = run(config);
            if (r == 0 || report.wall_ms < best.wall_ms) best = report;
          }
          auto [it, inserted] = counts_by_limit.try_emplace(limit, best.prime_count);
          if (!inserted && it->second != best.prime_count) {
            std::cerr << "error: prime count " << best.prime_count << " for limit " << limit
                      << " disagrees with earlier run (" << it->second
                      << "); benchmark aborted\n";
            return 1;
          }
          char row[192];
          std::snprintf(row, sizeof row, "%u,%llu,%llu,%s,%.3f,%llu,%llu,%llu\n", threads,
                        static_cast<unsigned long long>(limit),
                        static_cast<unsigned long long>(span), width_name(width), best.wall_ms,
                        static_cast<unsigned long long>(best.iterations),
                        static_cast<unsigned long long>(best.peak_flag_bytes),
                        static_cast<unsigned long long>(best.prime_count));
          csv += row;
        }
      }
    }
  }

  if (args.csv_path.empty() || args.csv_path == "-") {
    std::fputs(csv.c_str(), stdout);
  } else {
    std::ofstream out(args.csv_path, std::ios::binary | std::ios::trunc);
    out << csv;
    if (!out) {
      std::cerr << "error: cannot write csv to " << args.csv_path << "\n";
      return 1;
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"wheel-6 segmented incremental multithreaded prime sieve"};
  app.require_subcommand(1);

  SieveArgs sieve_args;
  CLI::App* sieve = app.add_subcommand("sieve", "enumerate primes up to a limit (or unbounded)");
  sieve->add_option("--limit", sieve_args.limit_text,
                    "inclusive upper bound, or 'unbounded'")->required();
  sieve->add_option("--threads", sieve_args.threads, "worker thread count");
  sieve->add_option("--segment", sieve_args.segment,
                    "value span per iteration (rounded up to a multiple of 6*threads)");
  sieve->add_option("--flag-width", sieve_args.width, "flag storage width")
      ->transform(CLI::CheckedTransformer(kWidthNames, CLI::ignore_case));
  CLI::Option* count_only =
      sieve->add_flag("--count-only", sieve_args.count_only, "count primes, do not output them");
  CLI::Option* out =
      sieve->add_option("--out", sieve_args.out_dir, "write primes to chunk files in this directory");
  count_only->excludes(out);
  sieve->add_option("--format", sieve_args.format, "chunk file format")
      ->transform(CLI::CheckedTransformer(kFormatNames, CLI::ignore_case));
  sieve->add_option("--primes-per-file", sieve_args.primes_per_file,
                    "primes per chunk file before rollover");
  sieve->add_flag("--spawn-per-iteration", sieve_args.spawn_per_iteration,
                  "spawn fresh worker threads every iteration instead of pooling");

  VerifyArgs verify_args;
  CLI::App* verify =
      app.add_subcommand("verify", "compare the pipeline against the naive reference sieve");
  verify->add_option("--limit", verify_args.limit, "inclusive upper bound")->required();
  verify->add_option("--threads", verify_args.threads, "worker thread count");
  verify->add_option("--segment", verify_args.segment, "value span per iteration");
  verify->add_option("--flag-width", verify_args.width, "flag storage width")
      ->transform(CLI::CheckedTransformer(kWidthNames, CLI::ignore_case));
  uint64_t poison_value = 0;
  CLI::Option* poison_opt = verify->add_option(
      "--poison", poison_value, "drop this prime from the pipeline output (failure-path check)");

  BenchArgs bench_args;
  CLI::App* bench = app.add_subcommand("bench", "sweep configurations and emit CSV timings");
  bench->add_option("--limits", bench_args.limits, "comma-separated inclusive bounds")
      ->required()
      ->delimiter(',');
  bench->add_option("--threads", bench_args.threads, "comma-separated thread counts")
      ->delimiter(',');
  bench->add_option("--segments", bench_args.segments, "comma-separated value spans")
      ->delimiter(',');
  bench->add_option("--flag-widths", bench_args.widths, "comma-separated flag widths")
      ->delimiter(',')
      ->check(CLI::IsMember({"bit", "byte", "word4"}));
  bench->add_option("--repeats", bench_args.repeats, "runs per configuration; wall_ms is the minimum");
  bench->add_option("--csv", bench_args.csv_path, "output file ('-' or omitted for stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (poison_opt->count() > 0) verify_args.poison = poison_value;

  try {
    if (sieve->parsed()) return cmd_sieve(sieve_args);
    if (verify->parsed()) return cmd_verify(verify_args);
    if (bench->parsed()) return cmd_bench(bench_args);
  } catch (const wheelsieve::SinkFailure& e) {
    std::cerr << "error: " << e.what() << " (" << e.partial().prime_count
              << " primes emitted before the failure)\n";
    return 1;
  } catch (const wheelsieve::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
