#include "cli/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "cli/report.hpp"
#include "cli/wav.hpp"
#include "fastsdr/metrics.hpp"
#include "fastsdr/oracle.hpp"
#include "fastsdr/preconditioner.hpp"
#include "fastsdr/synthetic.hpp"

namespace fastsdr::cli {

int exit_code_for(ErrorCode code) {
  if (code == ErrorCode::kIo || code == ErrorCode::kFormat) return 2;
  if (is_solver_error(code)) return 4;
  return 3;
}

std::string error_json(const Error& e) {
  Json j;
  j["code"] = std::string(to_string(e.code()));
  j["stage"] = e.stage();
  j["message"] = e.what();
  j["exit_code"] = exit_code_for(e.code());
  return Json{{"error", j}}.dump();
}

MultichannelSignal load_signals(const std::vector<std::string>& paths) {
  if (paths.empty()) throw Error(ErrorCode::kEmptyInput, "no input files");
  std::vector<std::vector<double>> channels;
  double rate = 0.0;
  std::size_t length = 0;
  for (std::size_t i = 0; i < paths.size(); ++i) {
    const auto s = read_wav(paths[i]);
    if (i == 0) {
      rate = s.sample_rate();
      length = s.length();
    } else if (s.sample_rate() != rate) {
      throw Error(ErrorCode::kRateMismatch, paths[i] + ": sample rate " + format_double(s.sample_rate()) +
                                                " differs from " + format_double(rate));
    } else if (s.length() != length) {
      throw Error(ErrorCode::kLengthMismatch, paths[i] + ": " + std::to_string(s.length()) +
                                                  " samples, expected " + std::to_string(length));
    }
    for (std::size_t c = 0; c < s.channels(); ++c) channels.emplace_back(s.channel(c).begin(), s.channel(c).end());
  }
  return MultichannelSignal::from_channels(channels, rate);
}

int run_eval(const EvalRequest& req, std::ostream& out, std::ostream& err) {
  try {
    const auto refs = [&] {
      try {
        return load_signals(req.ref_paths);
      } catch (const Error& e) {
        throw e.with_stage("load-references");
      }
    }();
    const auto ests = [&] {
      try {
        return load_signals(req.est_paths);
      } catch (const Error& e) {
        throw e.with_stage("load-estimates");
      }
    }();
    if (refs.sample_rate() != ests.sample_rate()) {
      throw Error(ErrorCode::kRateMismatch, "references at " + format_double(refs.sample_rate()) +
                                                " Hz, estimates at " + format_double(ests.sample_rate()) + " Hz",
                  "validate");
    }
    const auto result = bss_eval(refs, ests, req.config);

    std::string text;
    if (req.output == OutputFormat::kCsv) {
      text = report_csv(result);
    } else {
      ReportContext ctx{req.config, req.ref_paths, req.est_paths, refs.sample_rate()};
      text = report_json(result, ctx).dump(2) + "\n";
    }
    if (req.output_path.empty()) {
      out << text;
    } else {
      std::ofstream file(req.output_path, std::ios::binary);
      if (!file) throw Error(ErrorCode::kIo, req.output_path + ": cannot open for writing", "output");
      file << text;
      if (!file) throw Error(ErrorCode::kIo, req.output_path + ": write failed", "output");
    }
    return 0;
  } catch (const Error& e) {
    err << error_json(e) << '\n';
    return exit_code_for(e.code());
  }
}

std::vector<BenchRow> run_bench_grid(const BenchRequest& req) {
  using Clock = std::chrono::steady_clock;
  std::vector<BenchRow> rows;
  for (std::size_t K : req.channels) {
    for (double secs : req.seconds) {
      const auto T = static_cast<std::size_t>(std::llround(secs * req.sample_rate));
      std::mt19937_64 rng(req.seed + 7919 * K + T);
      std::vector<synthetic::Instance> batch;
      for (std::size_t b = 0; b < std::max<std::size_t>(req.batch, 1); ++b) {
        batch.push_back(synthetic::white_instance(K, K, T, {}, rng));
      }
      // Repetitions are interleaved across the (L, solver) cells so slow
      // drift in machine load affects every cell alike.
      struct Cell {
        EvalConfig cfg;
        std::vector<double> ms;
      };
      std::vector<Cell> cells;
      for (std::size_t L : req.filter_lengths) {
        for (Solver solver : req.solvers) {
          Cell c;
          c.cfg.filter_length = L;
          c.cfg.solver = solver;
          c.cfg.cgd_iters = req.cgd_iters;
          c.cfg.metrics = req.metrics;
          c.cfg.threads = req.threads;
          cells.push_back(std::move(c));
        }
      }
      auto run_batch = [&](const EvalConfig& cfg) {
        for (const auto& inst : batch) {
          try {
            bss_eval(inst.references, inst.estimates, cfg);
          } catch (const Error& e) {
            throw e.with_stage("bench K=" + std::to_string(K) + " L=" + std::to_string(cfg.filter_length) + " " +
                               std::string(to_string(cfg.solver)));
          }
        }
      };
      for (const auto& c : cells) run_batch(c.cfg);  // warm-up, discarded
      for (std::size_t r = 0; r < req.reps; ++r) {
        for (auto& c : cells) {
          const auto start = Clock::now();
          run_batch(c.cfg);
          c.ms.push_back(std::chrono::duration<double, std::milli>(Clock::now() - start).count());
        }
      }
      for (const auto& c : cells) {
        BenchRow row{K, secs, c.cfg.filter_length, c.cfg.solver, 0.0, 0.0, 0.0, req.reps, batch.size()};
        const auto& ms = c.ms;
        if (!ms.empty()) {
          auto sorted = ms;
          std::sort(sorted.begin(), sorted.end());
          const std::size_t n = sorted.size();
          row.median_ms = n % 2 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
          for (double v : ms) row.mean_ms += v;
          row.mean_ms /= static_cast<double>(n);
          double var = 0.0;
          for (double v : ms) var += (v - row.mean_ms) * (v - row.mean_ms);
          if (n > 1) row.stddev_ms = std::sqrt(var / static_cast<double>(n - 1));
        }
        rows.push_back(row);
      }
    }
  }
  return rows;
}

int run_bench(const BenchRequest& req, std::ostream& out, std::ostream& err) {
  std::vector<BenchRow> rows;
  try {
    rows = run_bench_grid(req);
  } catch (const Error& e) {
    err << error_json(e) << '\n';
    return exit_code_for(e.code());
  }
  if (req.output == OutputFormat::kJson) {
    Json arr = Json::array();
    for (const auto& r : rows) {
      Json j;
      j["channels"] = r.channels;
      j["seconds"] = r.seconds;
      j["filter_length"] = r.filter_length;
      j["solver"] = std::string(to_string(r.solver));
      j["mean_ms"] = r.mean_ms;
      j["stddev_ms"] = r.stddev_ms;
      j["median_ms"] = r.median_ms;
      j["reps"] = r.reps;
      j["batch"] = r.batch;
      arr.push_back(std::move(j));
    }
    out << Json{{"rows", arr}}.dump(2) << '\n';
  } else if (req.output == OutputFormat::kCsv) {
    out << "channels,seconds,filter_length,solver,mean_ms,stddev_ms,median_ms,reps,batch\n";
    for (const auto& r : rows) {
      out << r.channels << ',' << format_double(r.seconds) << ',' << r.filter_length << ',' << to_string(r.solver)
          << ',' << format_double(r.mean_ms) << ',' << format_double(r.stddev_ms) << ','
          << format_double(r.median_ms) << ',' << r.reps << ','
          << r.batch << '\n';
    }
  } else {
    char line[160];
    std::snprintf(line, sizeof line, "%-8s %-8s %-6s %-9s %12s %12s %12s\n", "channels", "seconds", "taps",
                  "solver", "mean_ms", "stddev_ms", "median_ms");
    out << line;
    for (const auto& r : rows) {
      std::snprintf(line, sizeof line, "%-8zu %-8g %-6zu %-9s %12.3f %12.3f %12.3f\n", r.channels, r.seconds,
                    r.filter_length, std::string(to_string(r.solver)).c_str(), r.mean_ms, r.stddev_ms,
                    r.median_ms);
      out << line;
    }
  }
  return 0;
}

namespace {

double roundtrip_error(const auto& pre, std::span<const double> v) {
  std::vector<double> y(v.size()), back(v.size());
  pre.apply(v, y);
  pre.multiply(y, back);
  double worst = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    worst = std::max(worst, std::abs(back[i] - v[i]));
    scale = std::max(scale, std::abs(v[i]));
  }
  return worst / scale;
}

}  // namespace

std::vector<SelftestCheck> run_selftest_checks(const SelftestRequest& req) {
  auto tol = [&](double t) { return req.tolerance_override.value_or(t); };
  std::mt19937_64 rng(req.seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  SelftestCheck equiv{"equivalence", 0, 0.0, tol(1e-8), false};
  for (std::size_t i = 0; i < req.instances; ++i) {
    auto c = synthetic::random_small_case(rng);
    EvalConfig cfg;
    cfg.filter_length = c.filter_length;
    cfg.solver = Solver::kDirect;
    const auto fast = bss_eval(c.instance.references, c.instance.estimates, cfg);
    const auto ref = oracle::reference_bss_eval(c.instance.references, c.instance.estimates, c.filter_length);
    equiv.max_deviation = std::max(equiv.max_deviation, oracle::max_metric_deviation(fast, ref));
    ++equiv.cases;
  }

  SelftestCheck circ{"circulant-roundtrip", 0, 0.0, tol(1e-10), false};
  SelftestCheck block{"block-circulant-roundtrip", 0, 0.0, tol(1e-10), false};
  for (std::size_t i = 0; i < req.instances; ++i) {
    const std::size_t K = 1 + i % 3, L = 8 + 4 * (i % 5);
    std::vector<std::vector<double>> ch(K);
    for (auto& c : ch) {
      c.resize(6 * L);
      for (auto& v : c) v = normal(rng);
    }
    const auto refs = MultichannelSignal::from_channels(ch);
    const auto corr = compute_correlations(refs, refs, L);
    std::vector<double> v(K * L);
    for (auto& x : v) x = normal(rng);

    const auto col = corr.autocorr_column(0);
    const auto scalar = build_circulant_preconditioner(SymmetricToeplitz({col.begin(), col.end()}));
    circ.max_deviation = std::max(circ.max_deviation, roundtrip_error(scalar, std::span(v).first(L)));
    ++circ.cases;

    const auto pre = build_block_circulant_preconditioner(BlockToeplitz(K, L, corr.acf));
    block.max_deviation = std::max(block.max_deviation, roundtrip_error(pre, v));
    ++block.cases;
  }

  std::vector<SelftestCheck> checks{equiv, circ, block};
  for (auto& c : checks) c.passed = c.max_deviation <= c.tolerance;
  return checks;
}

int run_selftest(const SelftestRequest& req, std::ostream& out, std::ostream& err) {
  std::vector<SelftestCheck> checks;
  try {
    checks = run_selftest_checks(req);
  } catch (const Error& e) {
    err << error_json(e) << '\n';
    return exit_code_for(e.code());
  }
  bool ok = true;
  char line[200];
  for (const auto& c : checks) {
    std::snprintf(line, sizeof line, "%-4s %-26s cases=%-4zu max_deviation=%.3e tolerance=%.1e\n",
                  c.passed ? "PASS" : "FAIL", c.name.c_str(), c.cases, c.max_deviation, c.tolerance);
    out << line;
    ok = ok && c.passed;
  }
  return ok ? 0 : 1;
}

}  // namespace fastsdr::cli
