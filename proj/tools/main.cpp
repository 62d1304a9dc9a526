#include <CLI11.hpp>

#include <iostream>
#include <sstream>

#include "cli/commands.hpp"
#include "cli/report.hpp"

using namespace fastsdr;
using namespace fastsdr::cli;

namespace {

std::vector<std::string> split(const std::string& list) {
  std::vector<std::string> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

[[noreturn]] void invalid(const std::string& message) { throw Error(ErrorCode::kInvalidConfig, message, "arguments"); }

template <typename T>
std::vector<T> parse_list(const std::string& list, const char* what) {
  std::vector<T> out;
  for (const auto& item : split(list)) {
    std::istringstream in(item);
    T v{};
    if (!(in >> v) || !in.eof()) invalid(std::string("bad ") + what + " entry '" + item + "'");
    out.push_back(v);
  }
  return out;
}

Solver solver_or_throw(const std::string& name) {
  auto s = parse_solver(name);
  if (!s) invalid("unknown solver '" + name + "'");
  return *s;
}

MetricSet metrics_or_throw(const std::string& list) {
  auto m = parse_metric_set(list);
  if (!m) invalid("bad metric list '" + list + "'");
  return *m;
}

OutputFormat output_or_throw(const std::string& name, bool allow_table) {
  if (name == "json") return OutputFormat::kJson;
  if (name == "csv") return OutputFormat::kCsv;
  if (allow_table && name == "table") return OutputFormat::kTable;
  invalid("unknown output format '" + name + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fast bss_eval metrics (SDR, SIR, SAR, SI-SDR) for WAV files."};
  app.require_subcommand(1);

  std::size_t threads = 1;
  app.add_option("--threads", threads, "Worker threads")->envname("FASTSDR_THREADS")->check(CLI::PositiveNumber);

  // eval
  auto* eval = app.add_subcommand("eval", "Evaluate estimates against references");
  std::vector<std::string> refs, ests;
  std::size_t filter_length = 512, iters = 10;
  double tol = 0.0;
  std::string solver = "cgd", precision = "f64", metrics = "sdr,sir,sar", output = "json", out_path;
  bool no_permutation = false;
  eval->add_option("--ref", refs, "Reference WAV files (mono or multichannel)")->required()->expected(1, -1);
  eval->add_option("--est", ests, "Estimate WAV files (mono or multichannel)")->required()->expected(1, -1);
  eval->add_option("--filter-length", filter_length, "Distortion filter taps")->capture_default_str();
  eval->add_option("--solver", solver, "direct, cgd or levinson")->capture_default_str();
  eval->add_option("--iters", iters, "CGD iterations")->capture_default_str();
  eval->add_option("--tol", tol, "CGD relative residual tolerance (0: fixed iterations)")->capture_default_str();
  eval->add_option("--precision", precision, "f32 or f64")->capture_default_str();
  eval->add_option("--metrics", metrics, "Comma-separated subset of sdr,sir,sar")->capture_default_str();
  eval->add_flag("--no-permutation", no_permutation, "Keep the given channel order");
  eval->add_option("--output", output, "json or csv")->capture_default_str();
  eval->add_option("-o,--out", out_path, "Write the report here instead of stdout");

  // bench
  auto* bench = app.add_subcommand("bench", "Time the solvers on seeded synthetic signals");
  std::string b_channels = "2", b_seconds = "5", b_lengths = "512,1024", b_solvers = "cgd,direct",
              b_metrics = "sdr", b_output = "table";
  std::size_t b_reps = 10, b_batch = 10, b_iters = 10;
  std::uint64_t seed = 0;
  bench->add_option("--channels", b_channels, "Channel counts")->capture_default_str();
  bench->add_option("--seconds", b_seconds, "Signal durations at 16 kHz")->capture_default_str();
  bench->add_option("--filter-lengths", b_lengths, "Filter lengths")->capture_default_str();
  bench->add_option("--solvers", b_solvers, "Solvers")->capture_default_str();
  bench->add_option("--reps", b_reps, "Timed repetitions")->capture_default_str();
  bench->add_option("--batch", b_batch, "Signals per repetition")->capture_default_str();
  bench->add_option("--iters", b_iters, "CGD iterations")->capture_default_str();
  bench->add_option("--metrics", b_metrics, "Metrics to compute")->capture_default_str();
  bench->add_option("--seed", seed, "Signal generator seed")->capture_default_str();
  bench->add_option("--output", b_output, "table, json or csv")->capture_default_str();

  // selftest
  auto* selftest = app.add_subcommand("selftest", "Check the fast path against the dense oracle");
  std::size_t s_instances = 50;
  std::uint64_t s_seed = 1;
  bool zero_tolerance = false;
  selftest->add_option("--instances", s_instances, "Random instances per check")->capture_default_str();
  selftest->add_option("--seed", s_seed, "Generator seed")->capture_default_str();
  selftest->add_flag("--zero-tolerance", zero_tolerance, "Debug: require exact agreement (expected to fail)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << error_json(Error(ErrorCode::kInvalidConfig, e.what(), "arguments")) << '\n';
    return 3;
  }

  try {
    if (eval->parsed()) {
      EvalRequest req;
      req.ref_paths = refs;
      req.est_paths = ests;
      req.config.filter_length = filter_length;
      req.config.solver = solver_or_throw(solver);
      req.config.cgd_iters = iters;
      req.config.cgd_tol = tol;
      auto p = parse_precision(precision);
      if (!p) invalid("unknown precision '" + precision + "'");
      req.config.precision = *p;
      req.config.metrics = metrics_or_throw(metrics);
      req.config.resolve_permutation = !no_permutation;
      req.config.threads = threads;
      req.output = output_or_throw(output, false);
      req.output_path = out_path;
      return run_eval(req, std::cout, std::cerr);
    }
    if (bench->parsed()) {
      BenchRequest req;
      req.channels = parse_list<std::size_t>(b_channels, "channel");
      req.seconds = parse_list<double>(b_seconds, "seconds");
      req.filter_lengths = parse_list<std::size_t>(b_lengths, "filter length");
      req.solvers.clear();
      for (const auto& s : split(b_solvers)) req.solvers.push_back(solver_or_throw(s));
      req.reps = b_reps;
      req.batch = b_batch;
      req.cgd_iters = b_iters;
      req.metrics = metrics_or_throw(b_metrics);
      req.seed = seed;
      req.threads = threads;
      req.output = output_or_throw(b_output, true);
      return run_bench(req, std::cout, std::cerr);
    }
    SelftestRequest req;
    req.instances = s_instances;
    req.seed = s_seed;
    if (zero_tolerance) req.tolerance_override = 0.0;
    return run_selftest(req, std::cout, std::cerr);
  } catch (const Error& e) {
    std::cerr << error_json(e) << '\n';
    return exit_code_for(e.code());
  }
}
