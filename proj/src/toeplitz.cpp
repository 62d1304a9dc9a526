#include "fastsdr/toeplitz.hpp"

#include <cmath>
#include <limits>

#include "fastsdr/error.hpp"

namespace fastsdr {

namespace {

// Spectrum of the circulant of size n whose first column embeds the
// Toeplitz generator t (length 2L-1, index tau + L - 1).
std::vector<std::complex<double>> embedding_spectrum(const RealFft& fft,
                                                     std::span<const double> t,
                                                     std::size_t L) {
  std::vector<double> col(fft.size(), 0.0);
  for (std::size_t tau = 0; tau < L; ++tau) col[tau] = t[tau + L - 1];
  for (std::size_t tau = 1; tau < L; ++tau) col[fft.size() - tau] = t[L - 1 - tau];
  return fft.forward(col);
}

}  // namespace

SymmetricToeplitz::SymmetricToeplitz(std::vector<double> first_column)
    : column_(std::move(first_column)) {
  if (column_.empty()) throw Error(ErrorCode::kDimensionMismatch, "empty Toeplitz column");
  const std::size_t L = column_.size();
  fft_ = std::make_shared<const RealFft>(next_fast_size(2 * L - 1));
  std::vector<double> gen(2 * L - 1);
  for (std::size_t i = 0; i < L; ++i) {
    gen[L - 1 + i] = column_[i];
    gen[L - 1 - i] = column_[i];
  }
  spectrum_ = embedding_spectrum(*fft_, gen, L);
}

SymmetricToeplitz SymmetricToeplitz::with_diagonal_loading(double loading) const {
  std::vector<double> col = column_;
  col[0] += loading;
  return SymmetricToeplitz(std::move(col));
}

void SymmetricToeplitz::multiply(std::span<const double> v, std::span<double> out) const {
  const std::size_t L = size();
  if (v.size() != L || out.size() != L) {
    throw Error(ErrorCode::kDimensionMismatch, "Toeplitz matvec dimension mismatch");
  }
  if (L == 1) {
    out[0] = column_[0] * v[0];
    return;
  }
  auto spec = fft_->forward(v);
  for (std::size_t i = 0; i < spec.size(); ++i) spec[i] *= spectrum_[i];
  std::vector<double> full(fft_->size());
  fft_->inverse(spec, full);
  std::copy_n(full.begin(), L, out.begin());
}

Eigen::MatrixXd SymmetricToeplitz::dense() const {
  const auto L = static_cast<Eigen::Index>(size());
  Eigen::MatrixXd m(L, L);
  for (Eigen::Index i = 0; i < L; ++i) {
    for (Eigen::Index j = 0; j < L; ++j) m(i, j) = column_[static_cast<std::size_t>(std::abs(i - j))];
  }
  return m;
}

BlockToeplitz::BlockToeplitz(std::size_t num_blocks, std::size_t block_size,
                             std::vector<std::vector<double>> generators)
    : num_blocks_(num_blocks), block_size_(block_size), generators_(std::move(generators)) {
  if (num_blocks_ == 0 || block_size_ == 0) {
    throw Error(ErrorCode::kDimensionMismatch, "empty block-Toeplitz operator");
  }
  if (generators_.size() != num_blocks_ * num_blocks_) {
    throw Error(ErrorCode::kDimensionMismatch, "need K*K block generators");
  }
  const std::size_t len = 2 * block_size_ - 1;
  for (const auto& g : generators_) {
    if (g.size() != len) throw Error(ErrorCode::kDimensionMismatch, "block generator must have 2L-1 entries");
  }
  for (std::size_t k = 0; k < num_blocks_; ++k) {
    for (std::size_t l = k; l < num_blocks_; ++l) {
      const auto& a = generators_[k * num_blocks_ + l];
      const auto& b = generators_[l * num_blocks_ + k];
      double scale = 0.0;
      for (double x : a) scale = std::max(scale, std::abs(x));
      for (std::size_t i = 0; i < len; ++i) {
        if (std::abs(a[i] - b[len - 1 - i]) > 1e-9 * std::max(scale, 1e-300)) {
          throw Error(ErrorCode::kDimensionMismatch,
                      "block-Toeplitz operator is not symmetric (block (l,k) must reverse block (k,l))");
        }
      }
    }
  }
  prepare();
}

void BlockToeplitz::prepare() {
  fft_ = std::make_shared<const RealFft>(next_fast_size(2 * block_size_ - 1));
  spectra_.clear();
  spectra_.reserve(generators_.size());
  for (const auto& g : generators_) spectra_.push_back(embedding_spectrum(*fft_, g, block_size_));
}

BlockToeplitz BlockToeplitz::with_diagonal_loading(double loading) const {
  auto gens = generators_;
  for (std::size_t k = 0; k < num_blocks_; ++k) gens[k * num_blocks_ + k][block_size_ - 1] += loading;
  return BlockToeplitz(num_blocks_, block_size_, std::move(gens));
}

void BlockToeplitz::multiply(std::span<const double> v, std::span<double> out) const {
  const std::size_t K = num_blocks_, L = block_size_;
  if (v.size() != K * L || out.size() != K * L) {
    throw Error(ErrorCode::kDimensionMismatch, "block-Toeplitz matvec dimension mismatch");
  }
  // One forward FFT per input segment, shared by the K block rows.
  std::vector<std::vector<std::complex<double>>> in_spec(K);
  for (std::size_t l = 0; l < K; ++l) in_spec[l] = fft_->forward(v.subspan(l * L, L));
  const std::size_t nspec = fft_->spectrum_size();
  std::vector<std::complex<double>> acc(nspec);
  std::vector<double> full(fft_->size());
  for (std::size_t k = 0; k < K; ++k) {
    std::fill(acc.begin(), acc.end(), std::complex<double>{});
    for (std::size_t l = 0; l < K; ++l) {
      const auto& s = spectra_[k * K + l];
      const auto& x = in_spec[l];
      for (std::size_t i = 0; i < nspec; ++i) acc[i] += s[i] * x[i];
    }
    fft_->inverse(acc, full);
    std::copy_n(full.begin(), L, out.begin() + static_cast<std::ptrdiff_t>(k * L));
  }
}

Eigen::MatrixXd BlockToeplitz::dense() const {
  const std::size_t K = num_blocks_, L = block_size_;
  Eigen::MatrixXd m(K * L, K * L);
  for (std::size_t k = 0; k < K; ++k) {
    for (std::size_t l = 0; l < K; ++l) {
      const auto& g = generators_[k * K + l];
      for (std::size_t i = 0; i < L; ++i) {
        for (std::size_t j = 0; j < L; ++j) {
          m(static_cast<Eigen::Index>(k * L + i), static_cast<Eigen::Index>(l * L + j)) =
              g[i + L - 1 - j];
        }
      }
    }
  }
  return m;
}

std::vector<double> toeplitz_matvec(const SymmetricToeplitz& op, std::span<const double> v) {
  std::vector<double> out(op.size());
  op.multiply(v, out);
  return out;
}

std::vector<double> block_toeplitz_matvec(const BlockToeplitz& op, std::span<const double> v) {
  std::vector<double> out(op.size());
  op.multiply(v, out);
  return out;
}

double base_diagonal_loading(double lag0, std::size_t n) {
  return std::numeric_limits<double>::epsilon() * static_cast<double>(n) * std::abs(lag0);
}

std::vector<double> diagonal_loading_ladder(double lag0, std::size_t n) {
  const double scale = static_cast<double>(n) * std::abs(lag0);
  return {base_diagonal_loading(lag0, n), 1e-10 * scale, 1e-8 * scale, 1e-6 * scale};
}

}  // namespace fastsdr
