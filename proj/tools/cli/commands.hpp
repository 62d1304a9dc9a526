#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fastsdr/error.hpp"
#include "fastsdr/types.hpp"

namespace fastsdr::cli {

enum class OutputFormat { kJson, kCsv, kTable };

/// Exit status for a library error: 2 for I/O and format problems, 4 for
/// solver failures, 3 for everything the input or config got wrong.
int exit_code_for(ErrorCode code);

/// Single-line JSON object describing `e`, written to stderr by the
/// commands.
std::string error_json(const Error& e);

/// Concatenates the channels of every file in argument order. All files
/// must agree on length and sample rate.
MultichannelSignal load_signals(const std::vector<std::string>& paths);

struct EvalRequest {
  std::vector<std::string> ref_paths;
  std::vector<std::string> est_paths;
  EvalConfig config;
  OutputFormat output = OutputFormat::kJson;
  std::string output_path;  // empty: write to `out`
};

int run_eval(const EvalRequest& req, std::ostream& out, std::ostream& err);

struct BenchRequest {
  std::vector<std::size_t> channels{2};
  std::vector<double> seconds{5.0};
  std::vector<std::size_t> filter_lengths{512, 1024};
  std::vector<Solver> solvers{Solver::kCgd, Solver::kDirect};
  std::size_t reps = 10;
  std::size_t batch = 10;
  std::uint64_t seed = 0;
  double sample_rate = 16000.0;
  MetricSet metrics{true, false, false};
  std::size_t cgd_iters = 10;
  std::size_t threads = 1;
  OutputFormat output = OutputFormat::kTable;
};

struct BenchRow {
  std::size_t channels = 0;
  double seconds = 0.0;
  std::size_t filter_length = 0;
  Solver solver = Solver::kCgd;
  /// Wall time of one batch, in milliseconds.
  double mean_ms = 0.0;
  double stddev_ms = 0.0;
  double median_ms = 0.0;
  std::size_t reps = 0;
  std::size_t batch = 0;
};

/// Times `batch` evaluations per repetition over the full grid, after one
/// discarded warm-up batch per cell.
std::vector<BenchRow> run_bench_grid(const BenchRequest& req);

int run_bench(const BenchRequest& req, std::ostream& out, std::ostream& err);

struct SelftestRequest {
  std::size_t instances = 50;
  std::uint64_t seed = 1;
  /// Replaces every check tolerance; 0 makes any rounding difference fail.
  std::optional<double> tolerance_override;
};

struct SelftestCheck {
  std::string name;
  std::size_t cases = 0;
  double max_deviation = 0.0;
  double tolerance = 0.0;
  bool passed = false;
};

std::vector<SelftestCheck> run_selftest_checks(const SelftestRequest& req);

int run_selftest(const SelftestRequest& req, std::ostream& out, std::ostream& err);

}  // namespace fastsdr::cli
