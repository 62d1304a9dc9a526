#include "fastsdr/correlator.hpp"

#include <complex>

#include "fastsdr/error.hpp"
#include "fastsdr/fft.hpp"
#include "fastsdr/parallel.hpp"

namespace fastsdr {

namespace {

using Spectrum = std::vector<std::complex<double>>;

// Circular correlation sum_u a[u] b[u + tau] for the requested lag window.
std::vector<double> correlate(const RealFft& fft, const Spectrum& a, const Spectrum& b,
                              std::ptrdiff_t first_lag, std::size_t count) {
  Spectrum prod(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) prod[i] = std::conj(a[i]) * b[i];
  std::vector<double> full(fft.size());
  fft.inverse(prod, full);
  const auto n = static_cast<std::ptrdiff_t>(fft.size());
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    std::ptrdiff_t lag = first_lag + static_cast<std::ptrdiff_t>(i);
    out[i] = full[static_cast<std::size_t>(((lag % n) + n) % n)];
  }
  return out;
}

}  // namespace

CorrelationSet compute_correlations(const MultichannelSignal& references,
                                    const MultichannelSignal& estimates,
                                    std::size_t filter_length,
                                    const CorrelationOptions& opts) {
  validate_pairing(references, estimates, filter_length);
  const std::size_t K = references.channels();
  const std::size_t M = estimates.channels();
  const std::size_t L = filter_length;
  const std::size_t T = references.length();

  CorrelationSet out;
  out.num_refs = K;
  out.num_ests = M;
  out.filter_length = L;
  out.length = T;
  out.has_cross_blocks = opts.cross_blocks || K == 1;
  out.acf.resize(K * K);
  out.xcorr.resize(K * M);

  const RealFft fft(next_fast_size(T + L - 1));
  std::vector<Spectrum> ref_spec(K), est_spec(M);
  parallel_for(K + M, opts.threads, [&](std::size_t i) {
    if (i < K) {
      ref_spec[i] = fft.forward(references.channel(i));
    } else {
      est_spec[i - K] = fft.forward(estimates.channel(i - K));
    }
  });

  const auto first_acf_lag = -static_cast<std::ptrdiff_t>(L - 1);
  // Upper-triangular acf blocks (and the diagonal); the lower triangle is
  // the lag reversal.
  std::vector<std::pair<std::size_t, std::size_t>> blocks;
  for (std::size_t k = 0; k < K; ++k) {
    for (std::size_t l = k; l < K; ++l) {
      if (l == k || out.has_cross_blocks) blocks.emplace_back(k, l);
    }
  }
  parallel_for(blocks.size() + K * M, opts.threads, [&](std::size_t i) {
    if (i < blocks.size()) {
      auto [k, l] = blocks[i];
      auto seq = correlate(fft, ref_spec[k], ref_spec[l], first_acf_lag, 2 * L - 1);
      if (k == l) {
        // Autocorrelations are even; remove the FFT round-off asymmetry.
        for (std::size_t j = 0; j + 1 < L; ++j) {
          const double v = 0.5 * (seq[j] + seq[2 * L - 2 - j]);
          seq[j] = seq[2 * L - 2 - j] = v;
        }
      }
      out.acf[k * K + l] = std::move(seq);
      round_to_precision(out.acf[k * K + l], opts.precision);
    } else {
      const std::size_t j = i - blocks.size();
      const std::size_t k = j / M, m = j % M;
      out.xcorr[j] = correlate(fft, ref_spec[k], est_spec[m], 0, L);
      round_to_precision(out.xcorr[j], opts.precision);
    }
  });
  for (auto [k, l] : blocks) {
    if (k == l) continue;
    const auto& up = out.acf[k * K + l];
    out.acf[l * K + k].assign(up.rbegin(), up.rend());
  }
  return out;
}

}  // namespace fastsdr
