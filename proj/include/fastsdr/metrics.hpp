#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "fastsdr/assignment.hpp"
#include "fastsdr/correlator.hpp"
#include "fastsdr/matrix.hpp"
#include "fastsdr/types.hpp"

namespace fastsdr {

/// Outcome of one linear system (one Toeplitz system per reference, one
/// joint block system shared by all estimates).
struct SystemReport {
  std::string system;
  Solver requested = Solver::kCgd;
  Solver used = Solver::kCgd;
  /// Largest CGD iteration count over the right-hand sides; 0 for direct
  /// solvers.
  std::size_t iterations = 0;
  /// Largest relative residual over the right-hand sides.
  double initial_residual = 0.0;
  double final_residual = 0.0;
  double extra_loading = 0.0;
  /// Why the requested solver was abandoned; empty when it was not.
  std::string fallback;
};

struct ClampEvent {
  std::string quantity;  // "c", "d" or "c/d"
  std::size_t ref = 0;
  std::size_t est = 0;
  double raw = 0.0;
  double clamped = 0.0;
};

struct Diagnostics {
  std::vector<SystemReport> systems;
  std::size_t toeplitz_solves = 0;
  std::size_t block_solves = 0;
  std::size_t fallbacks = 0;
  std::vector<ClampEvent> clamps;
};

/// h[k][m] solves R_k h = x_km; g[.][m] solves the joint system R g = z_m.
struct DistortionFilters {
  std::size_t num_refs = 0;
  std::size_t num_ests = 0;
  std::size_t filter_length = 0;
  std::vector<std::vector<double>> h;  // [k * M + m], empty when not computed
  std::vector<std::vector<double>> g;  // [k * M + m], empty when not computed

  bool has_h() const { return !h.empty(); }
  bool has_g() const { return !g.empty(); }
  const std::vector<double>& h_at(std::size_t k, std::size_t m) const { return h[k * num_ests + m]; }
  const std::vector<double>& g_at(std::size_t k, std::size_t m) const { return g[k * num_ests + m]; }
};

/// Squared cosines between each estimate and the shift subspace of one
/// reference (c) or of all references (d).
struct CosineMetrics {
  std::size_t num_refs = 0;
  std::size_t num_ests = 0;
  RealMatrix c;                 // clamped to [eps, 1 - eps]
  std::vector<double> d;        // clamped, empty without the joint system
  RealMatrix c_raw;             // x_km' h_km
  std::vector<double> d_raw;    // sum_k x_km' g_km

  bool has_d() const { return !d.empty(); }
  /// c/d, formed from the clamped values and clamped again.
  double c_over_d(std::size_t k, std::size_t m, double eps) const;

  /// Angles: alpha = acos(sqrt(c)), beta = acos(sqrt(c/d)), gamma = acos(sqrt(d)).
  double alpha(std::size_t k, std::size_t m) const;
  double beta(std::size_t k, std::size_t m, double eps) const;
  double gamma(std::size_t m) const;
};

struct BssEvalResult {
  std::size_t num_refs = 0;
  std::size_t num_ests = 0;
  std::optional<RealMatrix> sdr;           // K x M, dB
  std::optional<RealMatrix> sir;           // K x M, dB
  std::optional<std::vector<double>> sar;  // M, dB
  std::optional<Permutation> permutation;
  CosineMetrics cosines;
  Diagnostics diagnostics;
};

/// f(x) = 10 log10(x / (1 - x)).
double db_map(double x);

/// Solves the K per-reference Toeplitz systems.
DistortionFilters compute_filters_sdr(const CorrelationSet& corr, const EvalConfig& cfg,
                                      Diagnostics* diag = nullptr);

/// Solves the joint block-Toeplitz system for every estimate. `warm`, when
/// given, must carry h filters from the same correlations; CGD then starts
/// from the stacked h. The returned filters hold g only.
DistortionFilters compute_filters_sir(const CorrelationSet& corr, const DistortionFilters* warm,
                                      const EvalConfig& cfg, Diagnostics* diag = nullptr);

/// c_km = x_km' h_km and d_m = sum_k x_km' g_km, clamped to
/// [eps, 1 - eps]; clamping is recorded in `diag`.
CosineMetrics cosine_metrics(const CorrelationSet& corr, const DistortionFilters& filters,
                             double clamp_epsilon, Diagnostics* diag = nullptr);

/// Full pipeline: normalize, correlate, solve, cosine metrics, dB, and
/// optionally the permutation. Errors carry the failing stage.
BssEvalResult bss_eval(const MultichannelSignal& references, const MultichannelSignal& estimates,
                       const EvalConfig& cfg = {});

/// bss_eval with a single-tap filter.
BssEvalResult si_sdr(const MultichannelSignal& references, const MultichannelSignal& estimates,
                     EvalConfig cfg = {});

}  // namespace fastsdr
