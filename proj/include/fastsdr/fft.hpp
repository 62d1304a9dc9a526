#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace fastsdr {

/// Smallest 2^a 3^b 5^c integer >= n.
std::size_t next_fast_size(std::size_t n);

/// Real-to-complex transform of fixed size backed by FFTW. Plans are
/// created once per size and shared; execution is thread-safe.
class RealFft {
 public:
  explicit RealFft(std::size_t n);

  std::size_t size() const { return n_; }
  std::size_t spectrum_size() const { return n_ / 2 + 1; }

  /// Unnormalized forward transform. `in` may be shorter than size(); the
  /// remainder is treated as zeros.
  void forward(std::span<const double> in, std::span<std::complex<double>> out) const;
  std::vector<std::complex<double>> forward(std::span<const double> in) const;

  /// Inverse transform scaled by 1/size(), so inverse(forward(x)) == x.
  /// `in` is used as scratch and clobbered.
  void inverse(std::span<std::complex<double>> in, std::span<double> out) const;

 private:
  struct Plans;
  std::size_t n_;
  std::shared_ptr<const Plans> plans_;
};

}  // namespace fastsdr
