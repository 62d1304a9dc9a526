#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "fastsdr/types.hpp"

namespace fastsdr {

/// y = Op(x); both spans have the operator's dimension.
using LinearOperator = std::function<void(std::span<const double>, std::span<double>)>;

struct CgdOptions {
  std::size_t max_iters = 10;
  /// Stop once ||b - A x|| / ||b|| <= rel_tol. Zero runs exactly max_iters
  /// iterations (unless the residual vanishes).
  double rel_tol = 0.0;
  bool record_residuals = false;
  /// Storage precision of the iterates; reductions are always double.
  Precision precision = Precision::kDouble;
};

struct CgdResult {
  std::vector<double> solution;
  /// Relative residual before the first iteration and after each one
  /// (only when record_residuals is set).
  std::vector<double> residual_history;
  std::size_t iterations = 0;
  double initial_relative_residual = 0.0;
  double relative_residual = 0.0;
  bool converged = false;
};

/// Preconditioned conjugate gradient for a symmetric positive definite
/// `matvec`. `precond` applies M^{-1}; pass an empty function for plain CG.
/// `init` defaults to zero. Throws BreakdownDetected when a curvature
/// p'Ap or r'M^{-1}r is non-positive before convergence.
CgdResult cgd_solve(const LinearOperator& matvec, const LinearOperator& precond,
                    std::span<const double> rhs, std::span<const double> init,
                    const CgdOptions& opts);

/// Independent runs for several right-hand sides sharing the operators.
/// `inits` may be empty or hold one initial vector per right-hand side.
std::vector<CgdResult> cgd_solve_many(const LinearOperator& matvec, const LinearOperator& precond,
                                      const std::vector<std::vector<double>>& rhs,
                                      const std::vector<std::vector<double>>& inits,
                                      const CgdOptions& opts, std::size_t threads = 1);

}  // namespace fastsdr
