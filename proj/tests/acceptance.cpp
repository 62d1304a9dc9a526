// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
// fails. Tolerances and instance counts are fixed below.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "cli/commands.hpp"
#include "fastsdr/cgd.hpp"
#include "fastsdr/metrics.hpp"
#include "fastsdr/oracle.hpp"
#include "fastsdr/preconditioner.hpp"
#include "fastsdr/synthetic.hpp"
#include "support/test_oracles.hpp"

using namespace fastsdr;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool passed = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

Outcome theorem1_equivalence() {
  constexpr std::size_t kInstances = 200;
  constexpr double kTol = 1e-8;
  constexpr double kMaxSeconds = 60.0;
  const auto t0 = Clock::now();
  std::mt19937_64 rng(101);
  double worst = 0.0;
  for (std::size_t i = 0; i < kInstances; ++i) {
    const auto c = synthetic::random_small_case(rng);
    EvalConfig cfg;
    cfg.filter_length = c.filter_length;
    cfg.solver = Solver::kDirect;
    const auto fast = bss_eval(c.instance.references, c.instance.estimates, cfg);
    const auto ref = oracle::reference_bss_eval(c.instance.references, c.instance.estimates, c.filter_length);
    worst = std::max(worst, oracle::max_metric_deviation(fast, ref));
  }
  const double elapsed = seconds_since(t0);
  return {worst < kTol && elapsed < kMaxSeconds,
          fmt("%zu instances, max |fast - oracle| = %.2e dB (tol %.0e), %.1f s (limit %.0f s)", kInstances, worst,
              kTol, elapsed, kMaxSeconds)};
}

Outcome cgd10_accuracy() {
  constexpr std::size_t kInstances = 100;
  constexpr std::size_t kLength = 80000;
  constexpr std::size_t kFilterLength = 512;
  constexpr double kMedianTol = 1e-2;
  constexpr double kMeanTol = 2e-3;
  constexpr double kMaxSeconds = 600.0;
  const auto t0 = Clock::now();
  std::mt19937_64 rng(202);
  std::uniform_real_distribution<double> coeff(0.85, 0.95);
  std::vector<double> err[3];
  for (std::size_t i = 0; i < kInstances; ++i) {
    const auto inst = synthetic::ar1_instance(2, 2, kLength, coeff(rng), {}, rng);
    EvalConfig cfg;
    cfg.filter_length = kFilterLength;
    cfg.solver = Solver::kDirect;
    const auto direct = bss_eval(inst.references, inst.estimates, cfg);
    cfg.solver = Solver::kCgd;
    cfg.cgd_iters = 10;
    const auto cgd = bss_eval(inst.references, inst.estimates, cfg);
    for (std::size_t k = 0; k < 2; ++k) {
      for (std::size_t m = 0; m < 2; ++m) {
        err[0].push_back((*cgd.sdr)(k, m) - (*direct.sdr)(k, m));
        err[1].push_back((*cgd.sir)(k, m) - (*direct.sir)(k, m));
      }
    }
    for (std::size_t m = 0; m < 2; ++m) err[2].push_back((*cgd.sar)[m] - (*direct.sar)[m]);
  }
  const double elapsed = seconds_since(t0);
  bool ok = elapsed < kMaxSeconds;
  std::string detail = fmt("%zu instances (T=%zu, L=%zu, K=M=2):", kInstances, kLength, kFilterLength);
  const char* names[3] = {"SDR", "SIR", "SAR"};
  std::vector<double> pooled;
  for (int j = 0; j < 3; ++j) {
    std::vector<double> abs_err;
    for (double e : err[j]) abs_err.push_back(std::abs(e));
    const double med = median(abs_err), mu = mean(err[j]);
    ok = ok && med < kMedianTol && std::abs(mu) <= kMeanTol;
    detail += fmt(" %s median|e|=%.1e mean=%+.1e;", names[j], med, mu);
    pooled.insert(pooled.end(), err[j].begin(), err[j].end());
  }
  ok = ok && std::abs(mean(pooled)) <= kMeanTol;
  detail += fmt(" pooled mean=%+.1e (tol: median < %.0e, |mean| <= %.0e dB), %.0f s (limit %.0f s)", mean(pooled),
                kMedianTol, kMeanTol, elapsed, kMaxSeconds);
  return {ok, detail};
}

Outcome preconditioner_effectiveness() {
  constexpr double kCoeff = 0.9;
  constexpr double kTarget = 1e-6;
  constexpr std::size_t kMaxIters = 30;
  constexpr std::size_t kRhs = 5;
  std::mt19937_64 rng(303);
  std::vector<std::size_t> pre_iters, plain_iters;
  bool converged = true;
  for (std::size_t L : {64u, 256u, 1024u}) {
    const SymmetricToeplitz op(testing::ar1_autocorrelation(L, kCoeff));
    const auto pre = build_circulant_preconditioner(op);
    const LinearOperator matvec = [&](std::span<const double> v, std::span<double> out) { op.multiply(v, out); };
    const LinearOperator precond = [&](std::span<const double> v, std::span<double> out) { pre.apply(v, out); };
    CgdOptions opts;
    opts.max_iters = 10 * L;
    opts.rel_tol = kTarget;
    std::size_t worst_pre = 0, worst_plain = 0;
    for (std::size_t r = 0; r < kRhs; ++r) {
      const auto b = testing::random_vector(L, rng);
      const auto a = cgd_solve(matvec, precond, b, {}, opts);
      const auto p = cgd_solve(matvec, {}, b, {}, opts);
      converged = converged && a.converged && p.converged;
      worst_pre = std::max(worst_pre, a.iterations);
      worst_plain = std::max(worst_plain, p.iterations);
    }
    pre_iters.push_back(worst_pre);
    plain_iters.push_back(worst_plain);
  }
  const auto [lo, hi] = std::minmax_element(pre_iters.begin(), pre_iters.end());
  const bool ok = converged && *hi <= kMaxIters && *hi <= 2 * *lo && plain_iters.back() >= 2 * pre_iters.back();
  return {ok, fmt("AR(1) a=%.1f, rel. residual %.0e: preconditioned iters L=64/256/1024 = %zu/%zu/%zu (limit %zu, "
                  "spread <= 2x), unpreconditioned = %zu/%zu/%zu (L=1024 needs >= 2x)",
                  kCoeff, kTarget, pre_iters[0], pre_iters[1], pre_iters[2], kMaxIters, plain_iters[0],
                  plain_iters[1], plain_iters[2])};
}

cli::BenchRequest bench_request() {
  cli::BenchRequest req;
  req.seconds = {5.0};
  req.reps = 11;
  req.batch = 5;
  req.seed = 404;
  req.metrics = {true, false, false};
  return req;
}

Outcome filter_length_scaling() {
  constexpr double kCgdLo = 0.8, kCgdHi = 1.5, kDirectMin = 2.0;
  auto req = bench_request();
  req.channels = {2, 4};
  req.filter_lengths = {512, 1024};
  req.solvers = {Solver::kCgd, Solver::kDirect};
  const auto rows = cli::run_bench_grid(req);
  auto time_of = [&](std::size_t K, std::size_t L, Solver s) {
    for (const auto& r : rows) {
      if (r.channels == K && r.filter_length == L && r.solver == s) return r.median_ms;
    }
    return std::numeric_limits<double>::quiet_NaN();
  };
  bool ok = true;
  std::string detail = "5 s @16 kHz, SDR only, median of 11 batches of 5, L=1024/L=512 runtime ratio:";
  for (std::size_t K : req.channels) {
    const double cgd = time_of(K, 1024, Solver::kCgd) / time_of(K, 512, Solver::kCgd);
    const double direct = time_of(K, 1024, Solver::kDirect) / time_of(K, 512, Solver::kDirect);
    ok = ok && cgd >= kCgdLo && cgd <= kCgdHi && direct >= kDirectMin;
    detail += fmt(" %zu ch cgd=%.2f direct=%.2f;", K, cgd, direct);
  }
  detail += fmt(" (cgd in [%.1f, %.1f], direct >= %.0f)", kCgdLo, kCgdHi, kDirectMin);
  return {ok, detail};
}

Outcome channel_scaling() {
  constexpr double kMaxExponent = 3.0;
  auto req = bench_request();
  req.channels = {2, 4, 8};
  req.filter_lengths = {512};
  req.solvers = {Solver::kCgd};
  const auto rows = cli::run_bench_grid(req);
  // Least-squares slope of log(time) against log(K).
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(rows.size());
  std::string times;
  for (const auto& r : rows) {
    const double x = std::log(static_cast<double>(r.channels)), y = std::log(r.median_ms);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    times += fmt(" %zu ch %.1f ms;", r.channels, r.median_ms);
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return {slope < kMaxExponent,
          fmt("cgd, SDR only, L=512, 5 s, median of 11 batches of 5:%s fitted exponent %.2f (limit < %.0f)", times.c_str(), slope, kMaxExponent)};
}

Outcome hungarian_optimality() {
  constexpr std::size_t kMatrices = 200;
  std::mt19937_64 rng(505);
  std::uniform_int_distribution<std::size_t> size(1, 6);
  std::uniform_real_distribution<double> value(-40.0, 40.0);
  std::size_t mismatches = 0;
  for (std::size_t i = 0; i < kMatrices; ++i) {
    const std::size_t n = size(rng);
    RealMatrix p(n, n);
    for (auto& v : p.values) v = value(rng);
    if (solve_assignment(p).total != testing::brute_force_assignment(p)) ++mismatches;
  }
  return {mismatches == 0,
          fmt("%zu random matrices, K=M in [1, 6]: %zu totals differ from exhaustive search (exact comparison)",
              kMatrices, mismatches)};
}

Outcome oracle_consistency() {
  constexpr std::size_t kInstances = 100;
  constexpr double kTol = 1e-8;
  std::mt19937_64 rng(606);
  double additivity = 0.0, idempotency = 0.0, symmetry = 0.0;
  for (std::size_t i = 0; i < kInstances; ++i) {
    const auto c = synthetic::random_small_case(rng);
    const auto refs = normalize_unit_norm(c.instance.references);
    const auto ests = normalize_unit_norm(c.instance.estimates);
    const auto proj = oracle::build_projections(refs, c.filter_length);
    auto check = [&](const Eigen::MatrixXd& p) {
      idempotency = std::max(idempotency, (p * p - p).cwiseAbs().maxCoeff());
      symmetry = std::max(symmetry, (p - p.transpose()).cwiseAbs().maxCoeff());
    };
    check(proj.joint);
    for (const auto& p : proj.per_source) check(p);
    for (std::size_t m = 0; m < ests.channels(); ++m) {
      const auto y = oracle::pad_estimate(ests.channel(m), c.filter_length);
      for (std::size_t k = 0; k < refs.channels(); ++k) {
        const auto d = oracle::decompose(proj, y, k);
        additivity = std::max(additivity, (d.s_target + d.e_interf + d.e_artif - y).cwiseAbs().maxCoeff());
      }
    }
  }
  const bool ok = additivity < kTol && idempotency < kTol && symmetry < kTol;
  return {ok, fmt("%zu instances: max additivity %.1e, idempotency %.1e, symmetry %.1e (tol %.0e)", kInstances,
                  additivity, idempotency, symmetry, kTol)};
}

Outcome si_sdr_conformance() {
  constexpr std::size_t kPairs = 100;
  constexpr double kTol = 1e-8;
  std::mt19937_64 rng(707);
  std::uniform_int_distribution<std::size_t> length(64, 4000);
  std::uniform_real_distribution<double> gain(-3.0, 3.0), noise_level(0.01, 3.0);
  double worst = 0.0;
  for (std::size_t i = 0; i < kPairs; ++i) {
    const std::size_t T = length(rng);
    const auto s = testing::random_vector(T, rng);
    const auto n = testing::random_vector(T, rng);
    const double g = gain(rng), level = noise_level(rng);
    std::vector<double> e(T);
    for (std::size_t t = 0; t < T; ++t) e[t] = g * s[t] + level * n[t];
    const auto res = si_sdr(MultichannelSignal::from_channels({s}), MultichannelSignal::from_channels({e}));
    worst = std::max(worst, std::abs((*res.sdr)(0, 0) - testing::closed_form_si_sdr(s, e)));
  }
  return {worst < kTol, fmt("%zu random pairs: max |L=1 path - closed form| = %.1e dB (tol %.0e)", kPairs, worst, kTol)};
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"theorem1-equivalence", theorem1_equivalence},
      {"cgd10-accuracy", cgd10_accuracy},
      {"preconditioner-effectiveness", preconditioner_effectiveness},
      {"filter-length-scaling", filter_length_scaling},
      {"channel-scaling", channel_scaling},
      {"hungarian-optimality", hungarian_optimality},
      {"oracle-consistency", oracle_consistency},
      {"si-sdr-conformance", si_sdr_conformance},
  };
  int failures = 0;
  for (const auto& [name, run] : criteria) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s %s: %s\n", o.passed ? "PASS" : "FAIL", name, o.detail.c_str());
    std::fflush(stdout);
    failures += !o.passed;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(std::size(criteria)) - failures, std::size(criteria));
  return failures == 0 ? 0 : 1;
}
