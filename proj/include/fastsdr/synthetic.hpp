#pragma once

#include <cstddef>
#include <random>
#include <vector>

#include "fastsdr/oracle.hpp"
#include "fastsdr/types.hpp"

namespace fastsdr::synthetic {

/// x[t] = coeff * x[t-1] + w[t] with unit-variance Gaussian w, started from
/// the stationary distribution.
std::vector<double> ar1_process(std::size_t length, double coeff, std::mt19937_64& rng);

MultichannelSignal ar1_sources(std::size_t channels, std::size_t length, double coeff,
                               std::mt19937_64& rng, double sample_rate = 16000.0);

MultichannelSignal white_sources(std::size_t channels, std::size_t length, std::mt19937_64& rng,
                                 double sample_rate = 16000.0);

struct MixtureOptions {
  std::size_t taps = 16;
  /// Level of each interfering source relative to the target, drawn
  /// uniformly in dB.
  double leak_db_min = -15.0;
  double leak_db_max = -5.0;
  /// Noise standard deviation relative to the per-sample source RMS.
  double noise_rel = 0.05;
};

/// Random mixing spec where estimate m is dominated by source m (for
/// m < K) filtered by a short decaying random filter.
oracle::MixtureSpec random_mixture_spec(const MultichannelSignal& references, std::size_t outputs,
                                        const MixtureOptions& opts, std::mt19937_64& rng);

/// Sources plus a seeded mixture drawn from them.
struct Instance {
  MultichannelSignal references;
  MultichannelSignal estimates;
};

Instance ar1_instance(std::size_t sources, std::size_t outputs, std::size_t length, double coeff,
                      const MixtureOptions& opts, std::mt19937_64& rng);
Instance white_instance(std::size_t sources, std::size_t outputs, std::size_t length,
                        const MixtureOptions& opts, std::mt19937_64& rng);

/// Small random case for checking the fast path against the dense oracle:
/// K = M in {1, 2, 3}, T in [32, 128], L in [2, 16], white sources through
/// short random filters plus noise.
struct SmallCase {
  Instance instance;
  std::size_t filter_length = 0;
};

SmallCase random_small_case(std::mt19937_64& rng);

}  // namespace fastsdr::synthetic
