#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "fastsdr/fft.hpp"

namespace fastsdr {

/// Symmetric Toeplitz operator given by its first column r (r[0] is the
/// diagonal). Products use a circulant embedding of size >= 2L-1 whose
/// spectrum is computed once.
class SymmetricToeplitz {
 public:
  explicit SymmetricToeplitz(std::vector<double> first_column);

  std::size_t size() const { return column_.size(); }
  std::span<const double> first_column() const { return column_; }

  /// Same operator with `loading` added to the diagonal.
  SymmetricToeplitz with_diagonal_loading(double loading) const;

  void multiply(std::span<const double> v, std::span<double> out) const;
  Eigen::MatrixXd dense() const;

 private:
  std::vector<double> column_;
  std::shared_ptr<const RealFft> fft_;
  std::vector<std::complex<double>> spectrum_;
};

/// K x K array of general Toeplitz blocks of size L. Block (k, l) is given
/// by a generating sequence t of length 2L-1 where entry (i, j) of the block
/// is t[i - j + L - 1]. Block (l, k) must be the reversal of block (k, l).
class BlockToeplitz {
 public:
  BlockToeplitz(std::size_t num_blocks, std::size_t block_size,
                std::vector<std::vector<double>> generators);

  std::size_t num_blocks() const { return num_blocks_; }
  std::size_t block_size() const { return block_size_; }
  std::size_t size() const { return num_blocks_ * block_size_; }
  std::span<const double> generator(std::size_t k, std::size_t l) const {
    return generators_[k * num_blocks_ + l];
  }

  /// Adds `loading` to the lag-0 term of every diagonal block.
  BlockToeplitz with_diagonal_loading(double loading) const;

  void multiply(std::span<const double> v, std::span<double> out) const;
  Eigen::MatrixXd dense() const;

 private:
  void prepare();

  std::size_t num_blocks_;
  std::size_t block_size_;
  std::vector<std::vector<double>> generators_;
  std::shared_ptr<const RealFft> fft_;
  std::vector<std::vector<std::complex<double>>> spectra_;
};

std::vector<double> toeplitz_matvec(const SymmetricToeplitz& op, std::span<const double> v);
std::vector<double> block_toeplitz_matvec(const BlockToeplitz& op, std::span<const double> v);

/// Diagonal loading applied to a Gram matrix with diagonal `lag0` and size
/// `n` before any factorization: a few ulps of the largest possible
/// eigenvalue (n * lag0).
double base_diagonal_loading(double lag0, std::size_t n);

/// Escalating loadings tried by the direct solvers when factorization
/// fails. The first entry is base_diagonal_loading.
std::vector<double> diagonal_loading_ladder(double lag0, std::size_t n);

}  // namespace fastsdr
