#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "fastsdr/matrix.hpp"
#include "fastsdr/metrics.hpp"
#include "fastsdr/types.hpp"

/// Dense, explicit bss_eval: shift matrices, orthogonal projections and the
/// target/interference/artifact decomposition. Cubic in T + L - 1 and only
/// meant for validating the fast path on small instances.
namespace fastsdr::oracle {

/// Largest T + L - 1 the oracle accepts.
inline constexpr std::size_t kMaxPaddedLength = 4096;

/// (T + L - 1) x L matrix whose column j is `s` delayed by j samples.
Eigen::MatrixXd shift_matrix(std::span<const double> s, std::size_t filter_length);

struct Projections {
  std::vector<Eigen::MatrixXd> per_source;  // P_k
  Eigen::MatrixXd joint;                    // P
};

/// P_k = A_k (A_k'A_k)^{-1} A_k' and P = A (A'A)^{-1} A', with the same
/// diagonal loading the fast path applies. Throws SingularGram or
/// OracleTooLarge.
Projections build_projections(const MultichannelSignal& references, std::size_t filter_length);

struct Decomposition {
  Eigen::VectorXd s_target;
  Eigen::VectorXd e_interf;
  Eigen::VectorXd e_artif;
};

/// Zero-padded copy of `estimate` with `filter_length - 1` trailing zeros.
Eigen::VectorXd pad_estimate(std::span<const double> estimate, std::size_t filter_length);

Decomposition decompose(const Projections& proj, const Eigen::VectorXd& padded_estimate,
                        std::size_t k);

/// One decomposition per reference.
std::vector<Decomposition> decompose(const MultichannelSignal& references,
                                     std::span<const double> estimate, std::size_t filter_length);

struct DecompositionMetrics {
  double sdr = 0.0;
  double sir = 0.0;
  double sar = 0.0;
};

/// Energy ratios in dB. Each ratio a/b is mapped through a/(a+b), clamped to
/// [eps, 1 - eps] and converted with the same dB map as the fast path.
DecompositionMetrics metrics_via_decomposition(const Decomposition& d, double clamp_epsilon);

struct ReferenceResult {
  RealMatrix sdr;  // K x M
  RealMatrix sir;  // K x M
  RealMatrix sar;  // K x M (identical across k)
};

/// Normalizes both sets and evaluates every (reference, estimate) pair.
ReferenceResult reference_bss_eval(const MultichannelSignal& references,
                                   const MultichannelSignal& estimates, std::size_t filter_length,
                                   double clamp_epsilon = 1e-12);

/// Largest |fast - reference| over every SDR, SIR and SAR entry the fast
/// result carries.
double max_metric_deviation(const BssEvalResult& fast, const ReferenceResult& reference);

/// Convolutional mixture: estimate m = sum_k filters[m][k] * (gain_k s_k) +
/// b_m, truncated to the reference length.
struct MixtureSpec {
  std::size_t num_outputs = 0;
  std::vector<std::vector<double>> filters;  // [m * K + k]
  std::vector<double> gains;                 // per source; empty means 1
  /// Standard deviation of seeded white Gaussian noise.
  double noise_std = 0.0;
  /// Explicit noise b_m (length T each); overrides noise_std when set.
  std::vector<std::vector<double>> noise;
};

/// Deterministic given `seed`.
MultichannelSignal generate_mixture(const MultichannelSignal& references, const MixtureSpec& spec,
                                    std::uint64_t seed);

}  // namespace fastsdr::oracle
