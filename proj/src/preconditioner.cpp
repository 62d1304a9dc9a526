#include "fastsdr/preconditioner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "fastsdr/error.hpp"

namespace fastsdr {

std::vector<double> optimal_circulant_column(std::span<const double> generator) {
  if (generator.empty() || generator.size() % 2 == 0) {
    throw Error(ErrorCode::kDimensionMismatch, "generator must have 2L-1 entries");
  }
  const std::size_t L = (generator.size() + 1) / 2;
  const double inv = 1.0 / static_cast<double>(L);
  std::vector<double> c(L);
  c[0] = generator[L - 1];
  for (std::size_t n = 1; n < L; ++n) {
    const double t_pos = generator[L - 1 + n];
    const double t_neg = generator[n - 1];  // lag n - L
    c[n] = inv * (static_cast<double>(L - n) * t_pos + static_cast<double>(n) * t_neg);
  }
  return c;
}

std::vector<double> optimal_circulant_column_symmetric(std::span<const double> first_column) {
  const std::size_t L = first_column.size();
  std::vector<double> gen(2 * L - 1);
  for (std::size_t i = 0; i < L; ++i) {
    gen[L - 1 + i] = first_column[i];
    gen[L - 1 - i] = first_column[i];
  }
  return optimal_circulant_column(gen);
}

CirculantPreconditioner::CirculantPreconditioner(std::vector<double> first_column)
    : column_(std::move(first_column)) {
  const std::size_t L = column_.size();
  if (L == 0) throw Error(ErrorCode::kDimensionMismatch, "empty circulant");
  fft_ = std::make_shared<const RealFft>(L);
  const auto spec = fft_->forward(column_);
  eigenvalues_.resize(L);
  for (std::size_t f = 0; f < spec.size(); ++f) {
    eigenvalues_[f] = spec[f].real();
    if (f > 0) eigenvalues_[L - f] = spec[f].real();
  }
  double largest = 0.0;
  for (double e : eigenvalues_) largest = std::max(largest, std::abs(e));
  const double floor = std::numeric_limits<double>::epsilon() * static_cast<double>(L) * largest;
  for (std::size_t f = 0; f < L; ++f) {
    if (!(eigenvalues_[f] > floor)) {
      std::ostringstream msg;
      msg << "circulant eigenvalue " << eigenvalues_[f] << " at bin " << f << " is not positive";
      throw Error(ErrorCode::kNonPositivePreconditioner, msg.str());
    }
  }
}

void CirculantPreconditioner::apply(std::span<const double> v, std::span<double> out) const {
  auto spec = fft_->forward(v);
  for (std::size_t f = 0; f < spec.size(); ++f) spec[f] /= eigenvalues_[f];
  fft_->inverse(spec, out);
}

void CirculantPreconditioner::multiply(std::span<const double> v, std::span<double> out) const {
  auto spec = fft_->forward(v);
  for (std::size_t f = 0; f < spec.size(); ++f) spec[f] *= eigenvalues_[f];
  fft_->inverse(spec, out);
}

BlockCirculantPreconditioner::BlockCirculantPreconditioner(const BlockToeplitz& op)
    : num_blocks_(op.num_blocks()), block_size_(op.block_size()) {
  const std::size_t K = num_blocks_, L = block_size_;
  fft_ = std::make_shared<const RealFft>(L);
  const std::size_t nbins = fft_->spectrum_size();
  std::vector<std::vector<std::complex<double>>> spectra(K * K);
  for (std::size_t k = 0; k < K; ++k) {
    for (std::size_t l = 0; l < K; ++l) {
      spectra[k * K + l] = fft_->forward(optimal_circulant_column(op.generator(k, l)));
    }
  }
  bins_.resize(nbins);
  factors_.resize(nbins);
  for (std::size_t f = 0; f < nbins; ++f) {
    Eigen::MatrixXcd b(K, K);
    for (std::size_t k = 0; k < K; ++k) {
      for (std::size_t l = 0; l < K; ++l) {
        b(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(l)) = spectra[k * K + l][f];
      }
    }
    // Exact Hermitian symmetry; rounding in the two FFTs can differ by ulps.
    b = (0.5 * (b + b.adjoint())).eval();
    factors_[f].compute(b);
    bool ok = factors_[f].info() == Eigen::Success;
    if (ok) {
      const auto& lower = factors_[f].matrixLLT();
      const double largest = b.diagonal().real().cwiseAbs().maxCoeff();
      for (Eigen::Index i = 0; i < lower.rows(); ++i) {
        const double pivot = std::norm(lower(i, i));
        if (!(pivot > std::numeric_limits<double>::epsilon() * static_cast<double>(K * L) * largest)) ok = false;
      }
    }
    if (!ok) {
      throw Error(ErrorCode::kNonPositivePreconditioner,
                  "block-circulant bin " + std::to_string(f) + " is not positive definite");
    }
    bins_[f] = std::move(b);
  }
}

template <typename BinOp>
void BlockCirculantPreconditioner::transform(std::span<const double> v, std::span<double> out,
                                             BinOp&& op) const {
  const std::size_t K = num_blocks_, L = block_size_;
  if (v.size() != K * L || out.size() != K * L) {
    throw Error(ErrorCode::kDimensionMismatch, "block preconditioner dimension mismatch");
  }
  const std::size_t nbins = fft_->spectrum_size();
  std::vector<std::vector<std::complex<double>>> spec(K);
  for (std::size_t k = 0; k < K; ++k) spec[k] = fft_->forward(v.subspan(k * L, L));
  Eigen::VectorXcd x(static_cast<Eigen::Index>(K));
  for (std::size_t f = 0; f < nbins; ++f) {
    for (std::size_t k = 0; k < K; ++k) x(static_cast<Eigen::Index>(k)) = spec[k][f];
    Eigen::VectorXcd y = op(f, x);
    for (std::size_t k = 0; k < K; ++k) spec[k][f] = y(static_cast<Eigen::Index>(k));
  }
  for (std::size_t k = 0; k < K; ++k) fft_->inverse(spec[k], out.subspan(k * L, L));
}

void BlockCirculantPreconditioner::apply(std::span<const double> v, std::span<double> out) const {
  transform(v, out, [this](std::size_t f, const Eigen::VectorXcd& x) {
    return Eigen::VectorXcd(factors_[f].solve(x));
  });
}

void BlockCirculantPreconditioner::multiply(std::span<const double> v, std::span<double> out) const {
  transform(v, out, [this](std::size_t f, const Eigen::VectorXcd& x) {
    return Eigen::VectorXcd(bins_[f] * x);
  });
}

CirculantPreconditioner build_circulant_preconditioner(const SymmetricToeplitz& op) {
  return CirculantPreconditioner(optimal_circulant_column_symmetric(op.first_column()));
}

BlockCirculantPreconditioner build_block_circulant_preconditioner(const BlockToeplitz& op) {
  return BlockCirculantPreconditioner(op);
}

}  // namespace fastsdr
