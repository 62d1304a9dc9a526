#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "fastsdr/types.hpp"

namespace fastsdr {

/// Auto/cross-correlation sequences defining the Gram matrices of the
/// shift matrices and the right-hand sides of the filter systems.
///
/// acf(k, l) has 2L-1 entries; index tau + L - 1 holds
///   sum_u s_k[u] * s_l[u + tau],  tau in [-(L-1), L-1],
/// which is the inner product of s_k delayed by a and s_l delayed by b for
/// a - b = tau. xcorr(k, m) has L entries; index j holds the inner product of
/// s_k delayed by j with the zero-padded estimate m.
struct CorrelationSet {
  std::size_t num_refs = 0;
  std::size_t num_ests = 0;
  std::size_t filter_length = 0;
  std::size_t length = 0;
  /// False when only the diagonal acf blocks were computed.
  bool has_cross_blocks = false;
  std::vector<std::vector<double>> acf;    // [k * num_refs + l]
  std::vector<std::vector<double>> xcorr;  // [k * num_ests + m]

  std::span<const double> acf_seq(std::size_t k, std::size_t l) const {
    return acf[k * num_refs + l];
  }
  double acf_at(std::size_t k, std::size_t l, std::ptrdiff_t lag) const {
    return acf[k * num_refs + l][static_cast<std::size_t>(
        lag + static_cast<std::ptrdiff_t>(filter_length) - 1)];
  }
  /// Lags 0..L-1 of acf(k, k): the first column of R_k.
  std::span<const double> autocorr_column(std::size_t k) const {
    return acf_seq(k, k).subspan(filter_length - 1, filter_length);
  }
  std::span<const double> xcorr_seq(std::size_t k, std::size_t m) const {
    return xcorr[k * num_ests + m];
  }
};

struct CorrelationOptions {
  /// Off-diagonal acf blocks are only needed by the joint (SIR/SAR) system.
  bool cross_blocks = true;
  Precision precision = Precision::kDouble;
  std::size_t threads = 1;
};

/// FFT-based correlations with transform length >= T + L - 1 so that no
/// circular wrap-around reaches the lags that are kept.
CorrelationSet compute_correlations(const MultichannelSignal& references,
                                    const MultichannelSignal& estimates,
                                    std::size_t filter_length,
                                    const CorrelationOptions& opts = {});

}  // namespace fastsdr
