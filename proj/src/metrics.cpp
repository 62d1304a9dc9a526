#include "fastsdr/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fastsdr/cgd.hpp"
#include "fastsdr/error.hpp"
#include "fastsdr/parallel.hpp"
#include "fastsdr/preconditioner.hpp"
#include "fastsdr/solvers.hpp"
#include "fastsdr/toeplitz.hpp"

namespace fastsdr {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double clamp_unit(double x, double eps) { return std::clamp(x, eps, 1.0 - eps); }

struct SolveOutcome {
  std::vector<std::vector<double>> solutions;
  SystemReport report;
};

CgdOptions cgd_options(const EvalConfig& cfg) {
  CgdOptions opts;
  opts.max_iters = cfg.cgd_iters;
  opts.rel_tol = cfg.cgd_tol;
  opts.precision = cfg.precision;
  return opts;
}

void record_cgd(SystemReport& rep, const std::vector<CgdResult>& runs) {
  for (const auto& run : runs) {
    rep.iterations = std::max(rep.iterations, run.iterations);
    rep.initial_residual = std::max(rep.initial_residual, run.initial_relative_residual);
    rep.final_residual = std::max(rep.final_residual, run.relative_residual);
  }
}

template <typename Op>
double max_relative_residual(const Op& op, const std::vector<std::vector<double>>& rhs,
                             const std::vector<std::vector<double>>& sol) {
  double worst = 0.0;
  std::vector<double> ax(op.size());
  for (std::size_t i = 0; i < rhs.size(); ++i) {
    op.multiply(sol[i], ax);
    double num = 0.0, den = 0.0;
    for (std::size_t j = 0; j < ax.size(); ++j) {
      num += (ax[j] - rhs[i][j]) * (ax[j] - rhs[i][j]);
      den += rhs[i][j] * rhs[i][j];
    }
    if (den > 0.0) worst = std::max(worst, std::sqrt(num / den));
  }
  return worst;
}

template <typename Op>
SolveOutcome solve_direct(const Op& op, const std::vector<std::vector<double>>& rhs,
                          SystemReport rep) {
  auto direct = direct_solve_toeplitz(op, rhs);
  rep.used = Solver::kDirect;
  rep.extra_loading = direct.extra_loading;
  rep.final_residual = max_relative_residual(op, rhs, direct.solutions);
  return {std::move(direct.solutions), std::move(rep)};
}

SolveOutcome solve_symmetric(const SymmetricToeplitz& op,
                             const std::vector<std::vector<double>>& rhs,
                             const EvalConfig& cfg, std::string name) {
  SystemReport rep;
  rep.system = std::move(name);
  rep.requested = cfg.solver;
  rep.used = cfg.solver;
  if (cfg.solver == Solver::kCgd) {
    try {
      const auto pre = build_circulant_preconditioner(op);
      LinearOperator matvec = [&op](std::span<const double> v, std::span<double> out) {
        op.multiply(v, out);
      };
      LinearOperator precond = [&pre](std::span<const double> v, std::span<double> out) {
        pre.apply(v, out);
      };
      auto runs = cgd_solve_many(matvec, precond, rhs, {}, cgd_options(cfg));
      record_cgd(rep, runs);
      std::vector<std::vector<double>> sol;
      sol.reserve(runs.size());
      for (auto& r : runs) sol.push_back(std::move(r.solution));
      return {std::move(sol), std::move(rep)};
    } catch (const Error& e) {
      if (!is_solver_error(e.code())) throw;
      rep.fallback = std::string(to_string(e.code())) + ": " + e.what();
    }
  } else if (cfg.solver == Solver::kLevinson) {
    try {
      auto sol = levinson_solve(op, rhs);
      rep.final_residual = max_relative_residual(op, rhs, sol);
      return {std::move(sol), std::move(rep)};
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kLevinsonBreakdown) throw;
      rep.fallback = std::string(to_string(e.code())) + ": " + e.what();
    }
  }
  return solve_direct(op, rhs, std::move(rep));
}

SolveOutcome solve_block(const BlockToeplitz& op, const std::vector<std::vector<double>>& rhs,
                         const std::vector<std::vector<double>>& inits, const EvalConfig& cfg,
                         std::string name) {
  SystemReport rep;
  rep.system = std::move(name);
  rep.requested = cfg.solver;
  rep.used = cfg.solver;
  if (cfg.solver == Solver::kCgd) {
    try {
      const auto pre = build_block_circulant_preconditioner(op);
      LinearOperator matvec = [&op](std::span<const double> v, std::span<double> out) {
        op.multiply(v, out);
      };
      LinearOperator precond = [&pre](std::span<const double> v, std::span<double> out) {
        pre.apply(v, out);
      };
      auto runs = cgd_solve_many(matvec, precond, rhs, inits, cgd_options(cfg), cfg.threads);
      record_cgd(rep, runs);
      std::vector<std::vector<double>> sol;
      sol.reserve(runs.size());
      for (auto& r : runs) sol.push_back(std::move(r.solution));
      return {std::move(sol), std::move(rep)};
    } catch (const Error& e) {
      if (!is_solver_error(e.code())) throw;
      rep.fallback = std::string(to_string(e.code())) + ": " + e.what();
    }
  } else if (cfg.solver == Solver::kLevinson) {
    rep.fallback = "levinson has no block form";
  }
  return solve_direct(op, rhs, std::move(rep));
}

}  // namespace

double db_map(double x) { return 10.0 * std::log10(x / (1.0 - x)); }

double CosineMetrics::c_over_d(std::size_t k, std::size_t m, double eps) const {
  return clamp_unit(c(k, m) / d[m], eps);
}

double CosineMetrics::alpha(std::size_t k, std::size_t m) const { return std::acos(std::sqrt(c(k, m))); }

double CosineMetrics::beta(std::size_t k, std::size_t m, double eps) const {
  return std::acos(std::sqrt(c_over_d(k, m, eps)));
}

double CosineMetrics::gamma(std::size_t m) const { return std::acos(std::sqrt(d[m])); }

DistortionFilters compute_filters_sdr(const CorrelationSet& corr, const EvalConfig& cfg,
                                      Diagnostics* diag) {
  const std::size_t K = corr.num_refs, M = corr.num_ests, L = corr.filter_length;
  DistortionFilters out;
  out.num_refs = K;
  out.num_ests = M;
  out.filter_length = L;
  out.h.resize(K * M);
  std::vector<SystemReport> reports(K);

  parallel_for(K, cfg.threads, [&](std::size_t k) {
    try {
      const auto column = corr.autocorr_column(k);
      const SymmetricToeplitz op =
          SymmetricToeplitz(std::vector<double>(column.begin(), column.end()))
              .with_diagonal_loading(base_diagonal_loading(column[0], L));
      std::vector<std::vector<double>> rhs(M);
      for (std::size_t m = 0; m < M; ++m) {
        const auto x = corr.xcorr_seq(k, m);
        rhs[m].assign(x.begin(), x.end());
      }
      auto outcome = solve_symmetric(op, rhs, cfg, "toeplitz k=" + std::to_string(k));
      for (std::size_t m = 0; m < M; ++m) {
        round_to_precision(outcome.solutions[m], cfg.precision);
        out.h[k * M + m] = std::move(outcome.solutions[m]);
      }
      reports[k] = std::move(outcome.report);
    } catch (const Error& e) {
      throw e.with_stage("k=" + std::to_string(k));
    }
  });

  if (diag) {
    for (auto& r : reports) {
      if (!r.fallback.empty() && r.requested != Solver::kDirect) ++diag->fallbacks;
      diag->systems.push_back(std::move(r));
    }
    diag->toeplitz_solves += K;
  }
  return out;
}

DistortionFilters compute_filters_sir(const CorrelationSet& corr, const DistortionFilters* warm,
                                      const EvalConfig& cfg, Diagnostics* diag) {
  const std::size_t K = corr.num_refs, M = corr.num_ests, L = corr.filter_length;
  if (!corr.has_cross_blocks) {
    throw Error(ErrorCode::kDimensionMismatch, "joint system needs the off-diagonal correlation blocks");
  }
  if (warm && (!warm->has_h() || warm->num_refs != K || warm->num_ests != M || warm->filter_length != L)) {
    throw Error(ErrorCode::kDimensionMismatch, "warm-start filters do not match the correlations");
  }
  double lag0 = 0.0;
  for (std::size_t k = 0; k < K; ++k) lag0 = std::max(lag0, corr.autocorr_column(k)[0]);
  const BlockToeplitz op =
      BlockToeplitz(K, L, corr.acf).with_diagonal_loading(base_diagonal_loading(lag0, K * L));

  std::vector<std::vector<double>> rhs(M, std::vector<double>(K * L));
  std::vector<std::vector<double>> inits;
  if (warm) inits.assign(M, std::vector<double>(K * L));
  for (std::size_t m = 0; m < M; ++m) {
    for (std::size_t k = 0; k < K; ++k) {
      const auto x = corr.xcorr_seq(k, m);
      std::copy(x.begin(), x.end(), rhs[m].begin() + static_cast<std::ptrdiff_t>(k * L));
      if (warm) {
        const auto& h = warm->h_at(k, m);
        std::copy(h.begin(), h.end(), inits[m].begin() + static_cast<std::ptrdiff_t>(k * L));
      }
    }
  }

  auto outcome = solve_block(op, rhs, inits, cfg, "block");
  DistortionFilters out;
  out.num_refs = K;
  out.num_ests = M;
  out.filter_length = L;
  out.g.resize(K * M);
  for (std::size_t m = 0; m < M; ++m) {
    round_to_precision(outcome.solutions[m], cfg.precision);
    for (std::size_t k = 0; k < K; ++k) {
      const auto first = outcome.solutions[m].begin() + static_cast<std::ptrdiff_t>(k * L);
      out.g[k * M + m].assign(first, first + static_cast<std::ptrdiff_t>(L));
    }
  }
  if (diag) {
    if (!outcome.report.fallback.empty() && outcome.report.requested == Solver::kCgd) ++diag->fallbacks;
    diag->systems.push_back(std::move(outcome.report));
    diag->block_solves += 1;
  }
  return out;
}

CosineMetrics cosine_metrics(const CorrelationSet& corr, const DistortionFilters& filters,
                             double clamp_epsilon, Diagnostics* diag) {
  const std::size_t K = corr.num_refs, M = corr.num_ests;
  CosineMetrics out;
  out.num_refs = K;
  out.num_ests = M;
  out.c = RealMatrix(K, M);
  out.c_raw = RealMatrix(K, M);
  auto note = [&](const char* q, std::size_t k, std::size_t m, double raw, double clamped) {
    if (diag && raw != clamped) diag->clamps.push_back({q, k, m, raw, clamped});
  };
  if (filters.has_h()) {
    for (std::size_t k = 0; k < K; ++k) {
      for (std::size_t m = 0; m < M; ++m) {
        const double raw = dot(corr.xcorr_seq(k, m), filters.h_at(k, m));
        out.c_raw(k, m) = raw;
        out.c(k, m) = clamp_unit(raw, clamp_epsilon);
        note("c", k, m, raw, out.c(k, m));
      }
    }
  }
  if (filters.has_g()) {
    out.d_raw.assign(M, 0.0);
    out.d.assign(M, 0.0);
    for (std::size_t m = 0; m < M; ++m) {
      double acc = 0.0;
      for (std::size_t k = 0; k < K; ++k) acc += dot(corr.xcorr_seq(k, m), filters.g_at(k, m));
      out.d_raw[m] = acc;
      out.d[m] = clamp_unit(acc, clamp_epsilon);
      note("d", 0, m, acc, out.d[m]);
    }
  }
  return out;
}

BssEvalResult bss_eval(const MultichannelSignal& references, const MultichannelSignal& estimates,
                       const EvalConfig& cfg) {
  auto staged = [](const char* stage, auto&& fn) -> decltype(auto) {
    try {
      return fn();
    } catch (const Error& e) {
      throw e.with_stage(stage);
    }
  };

  staged("validate", [&] {
    cfg.validate();
    validate_pairing(references, estimates, cfg.filter_length);
    return 0;
  });
  auto prepare = [&](const MultichannelSignal& s) {
    MultichannelSignal n = normalize_unit_norm(s);
    if (cfg.precision == Precision::kDouble) return n;
    std::vector<double> data(n.data().begin(), n.data().end());
    round_to_precision(data, cfg.precision);
    return MultichannelSignal(n.channels(), n.length(), std::move(data), n.sample_rate());
  };
  const MultichannelSignal refs = staged("normalize", [&] { return prepare(references); });
  const MultichannelSignal ests = staged("normalize", [&] { return prepare(estimates); });

  const bool joint = cfg.metrics.needs_joint_system();
  CorrelationOptions copts;
  copts.cross_blocks = joint;
  copts.precision = cfg.precision;
  copts.threads = cfg.threads;
  const CorrelationSet corr =
      staged("correlate", [&] { return compute_correlations(refs, ests, cfg.filter_length, copts); });

  BssEvalResult result;
  result.num_refs = refs.channels();
  result.num_ests = ests.channels();
  const std::size_t K = result.num_refs, M = result.num_ests;
  Diagnostics& diag = result.diagnostics;

  // h is needed for c (SDR, SIR) and as the warm start of the joint system.
  DistortionFilters filters = staged("sdr-filters", [&] { return compute_filters_sdr(corr, cfg, &diag); });
  if (joint) {
    auto g = staged("sir-filters", [&] { return compute_filters_sir(corr, &filters, cfg, &diag); });
    filters.g = std::move(g.g);
  }

  const double eps = cfg.effective_clamp_epsilon();
  result.cosines = cosine_metrics(corr, filters, eps, &diag);
  const CosineMetrics& cos = result.cosines;

  RealMatrix sdr(K, M);
  for (std::size_t k = 0; k < K; ++k) {
    for (std::size_t m = 0; m < M; ++m) sdr(k, m) = db_map(cos.c(k, m));
  }
  if (cfg.metrics.sdr) result.sdr = sdr;
  if (cfg.metrics.sir) {
    RealMatrix sir(K, M);
    for (std::size_t k = 0; k < K; ++k) {
      for (std::size_t m = 0; m < M; ++m) {
        const double raw = cos.c(k, m) / cos.d[m];
        const double ratio = clamp_unit(raw, eps);
        if (raw != ratio) diag.clamps.push_back({"c/d", k, m, raw, ratio});
        sir(k, m) = db_map(ratio);
      }
    }
    result.sir = std::move(sir);
  }
  if (cfg.metrics.sar) {
    std::vector<double> sar(M);
    for (std::size_t m = 0; m < M; ++m) sar[m] = db_map(cos.d[m]);
    result.sar = std::move(sar);
  }
  if (cfg.resolve_permutation) {
    const RealMatrix& profits = result.sir ? *result.sir : sdr;
    result.permutation = staged("permutation", [&] { return solve_assignment(profits).mapping; });
  }
  return result;
}

BssEvalResult si_sdr(const MultichannelSignal& references, const MultichannelSignal& estimates,
                     EvalConfig cfg) {
  cfg.filter_length = 1;
  return bss_eval(references, estimates, cfg);
}

}  // namespace fastsdr
