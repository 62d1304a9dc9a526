#include "fastsdr/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <map>
#include <mutex>

#include "fastsdr/error.hpp"

namespace fastsdr {

namespace {

// FFTW planning and plan destruction are not thread-safe.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

struct RealFft::Plans {
  fftw_plan r2c = nullptr;
  fftw_plan c2r = nullptr;

  explicit Plans(std::size_t n) {
    std::vector<double> real(n);
    std::vector<std::complex<double>> cplx(n / 2 + 1);
    auto* c = reinterpret_cast<fftw_complex*>(cplx.data());
    // FFTW_ESTIMATE keeps plan selection deterministic run to run.
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    r2c = fftw_plan_dft_r2c_1d(static_cast<int>(n), real.data(), c, flags);
    c2r = fftw_plan_dft_c2r_1d(static_cast<int>(n), c, real.data(), flags);
  }
  ~Plans() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(r2c);
    fftw_destroy_plan(c2r);
  }
  Plans(const Plans&) = delete;
  Plans& operator=(const Plans&) = delete;
};

std::size_t next_fast_size(std::size_t n) {
  if (n <= 1) return 1;
  std::size_t best = std::size_t{1} << 62;
  for (std::size_t p5 = 1; p5 < best; p5 *= 5) {
    for (std::size_t p35 = p5; p35 < best; p35 *= 3) {
      std::size_t v = p35;
      while (v < n) v *= 2;
      best = std::min(best, v);
      if (p35 >= n) break;
    }
    if (p5 >= n) break;
  }
  return best;
}

RealFft::RealFft(std::size_t n) : n_(n) {
  if (n == 0) throw Error(ErrorCode::kDimensionMismatch, "fft size must be positive");
  static std::map<std::size_t, std::shared_ptr<const Plans>> cache;
  std::lock_guard lock(planner_mutex());
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, std::make_shared<const Plans>(n)).first;
  plans_ = it->second;
}

void RealFft::forward(std::span<const double> in, std::span<std::complex<double>> out) const {
  if (in.size() > n_ || out.size() != spectrum_size()) {
    throw Error(ErrorCode::kDimensionMismatch, "fft buffer size mismatch");
  }
  std::vector<double> buf(n_, 0.0);
  std::copy(in.begin(), in.end(), buf.begin());
  fftw_execute_dft_r2c(plans_->r2c, buf.data(), reinterpret_cast<fftw_complex*>(out.data()));
}

std::vector<std::complex<double>> RealFft::forward(std::span<const double> in) const {
  std::vector<std::complex<double>> out(spectrum_size());
  forward(in, out);
  return out;
}

void RealFft::inverse(std::span<std::complex<double>> in, std::span<double> out) const {
  if (in.size() != spectrum_size() || out.size() != n_) {
    throw Error(ErrorCode::kDimensionMismatch, "fft buffer size mismatch");
  }
  fftw_execute_dft_c2r(plans_->c2r, reinterpret_cast<fftw_complex*>(in.data()), out.data());
  const double scale = 1.0 / static_cast<double>(n_);
  for (double& v : out) v *= scale;
}

}  // namespace fastsdr
