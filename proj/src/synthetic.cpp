#include "fastsdr/synthetic.hpp"

#include <cmath>

namespace fastsdr::synthetic {

std::vector<double> ar1_process(std::size_t length, double coeff, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> x(length);
  double prev = normal(rng) / std::sqrt(1.0 - coeff * coeff);
  for (auto& v : x) {
    prev = coeff * prev + normal(rng);
    v = prev;
  }
  return x;
}

MultichannelSignal ar1_sources(std::size_t channels, std::size_t length, double coeff,
                               std::mt19937_64& rng, double sample_rate) {
  std::vector<std::vector<double>> ch;
  for (std::size_t c = 0; c < channels; ++c) ch.push_back(ar1_process(length, coeff, rng));
  return MultichannelSignal::from_channels(ch, sample_rate);
}

MultichannelSignal white_sources(std::size_t channels, std::size_t length, std::mt19937_64& rng,
                                 double sample_rate) {
  return ar1_sources(channels, length, 0.0, rng, sample_rate);
}

oracle::MixtureSpec random_mixture_spec(const MultichannelSignal& references, std::size_t outputs,
                                        const MixtureOptions& opts, std::mt19937_64& rng) {
  const std::size_t K = references.channels();
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> leak(opts.leak_db_min, opts.leak_db_max);
  oracle::MixtureSpec spec;
  spec.num_outputs = outputs;
  spec.filters.resize(outputs * K);
  double energy = 0.0;
  for (double v : references.data()) energy += v * v;
  const double rms = std::sqrt(energy / static_cast<double>(references.data().size()));
  for (std::size_t m = 0; m < outputs; ++m) {
    for (std::size_t k = 0; k < K; ++k) {
      auto& h = spec.filters[m * K + k];
      h.resize(std::max<std::size_t>(opts.taps, 1));
      h[0] = 1.0;
      for (std::size_t i = 1; i < h.size(); ++i) {
        h[i] = 0.3 * normal(rng) * std::exp(-3.0 * static_cast<double>(i) / static_cast<double>(h.size()));
      }
      const double level = (k == m % K) ? 1.0 : std::pow(10.0, leak(rng) / 20.0);
      for (double& v : h) v *= level;
    }
  }
  spec.noise_std = opts.noise_rel * rms;
  return spec;
}

namespace {

Instance make_instance(MultichannelSignal refs, std::size_t outputs, const MixtureOptions& opts,
                       std::mt19937_64& rng) {
  auto spec = random_mixture_spec(refs, outputs, opts, rng);
  auto ests = oracle::generate_mixture(refs, spec, rng());
  return {std::move(refs), std::move(ests)};
}

}  // namespace

Instance ar1_instance(std::size_t sources, std::size_t outputs, std::size_t length, double coeff,
                      const MixtureOptions& opts, std::mt19937_64& rng) {
  return make_instance(ar1_sources(sources, length, coeff, rng), outputs, opts, rng);
}

Instance white_instance(std::size_t sources, std::size_t outputs, std::size_t length,
                        const MixtureOptions& opts, std::mt19937_64& rng) {
  return make_instance(white_sources(sources, length, rng), outputs, opts, rng);
}

SmallCase random_small_case(std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> channels(1, 3), length(32, 128), taps(2, 16);
  const std::size_t K = channels(rng);
  const std::size_t T = length(rng);
  const std::size_t L = taps(rng);
  MixtureOptions opts;
  opts.taps = 4;
  return {white_instance(K, K, T, opts, rng), L};
}

}  // namespace fastsdr::synthetic
