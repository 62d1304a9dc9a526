#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "fastsdr/fft.hpp"
#include "fastsdr/toeplitz.hpp"

namespace fastsdr {

/// First column of the circulant closest in Frobenius norm to the general
/// Toeplitz matrix with generator t (length 2L-1, index tau + L - 1):
///   c[n] = ((L - n) t[n] + n t[n - L]) / L,  n in [0, L).
std::vector<double> optimal_circulant_column(std::span<const double> generator);

/// Same for a symmetric Toeplitz matrix given by its first column.
std::vector<double> optimal_circulant_column_symmetric(std::span<const double> first_column);

/// Circulant approximation C of a symmetric Toeplitz matrix, stored through
/// its (real) eigenvalues.
class CirculantPreconditioner {
 public:
  CirculantPreconditioner(std::vector<double> first_column);

  std::size_t size() const { return column_.size(); }
  std::span<const double> first_column() const { return column_; }
  std::span<const double> eigenvalues() const { return eigenvalues_; }

  /// out = C^{-1} v
  void apply(std::span<const double> v, std::span<double> out) const;
  /// out = C v
  void multiply(std::span<const double> v, std::span<double> out) const;

 private:
  std::vector<double> column_;
  std::shared_ptr<const RealFft> fft_;
  std::vector<double> eigenvalues_;
};

/// Block-circulant approximation of a block-Toeplitz matrix. In the Fourier
/// domain it is block diagonal with one Hermitian K x K matrix per bin; each
/// is Cholesky-factored once.
class BlockCirculantPreconditioner {
 public:
  explicit BlockCirculantPreconditioner(const BlockToeplitz& op);

  std::size_t num_blocks() const { return num_blocks_; }
  std::size_t block_size() const { return block_size_; }
  std::size_t size() const { return num_blocks_ * block_size_; }

  /// K x K matrix of bin f in [0, L/2].
  const Eigen::MatrixXcd& bin_matrix(std::size_t f) const { return bins_[f]; }

  void apply(std::span<const double> v, std::span<double> out) const;
  void multiply(std::span<const double> v, std::span<double> out) const;

 private:
  template <typename BinOp>
  void transform(std::span<const double> v, std::span<double> out, BinOp&& op) const;

  std::size_t num_blocks_;
  std::size_t block_size_;
  std::shared_ptr<const RealFft> fft_;
  std::vector<Eigen::MatrixXcd> bins_;
  std::vector<Eigen::LLT<Eigen::MatrixXcd>> factors_;
};

/// Throws NonPositivePreconditioner when an eigenvalue is not safely
/// positive.
CirculantPreconditioner build_circulant_preconditioner(const SymmetricToeplitz& op);

/// Throws NonPositivePreconditioner when a bin matrix is not positive
/// definite.
BlockCirculantPreconditioner build_block_circulant_preconditioner(const BlockToeplitz& op);

}  // namespace fastsdr
