#pragma once

#include <cstddef>
#include <vector>

#include "fastsdr/toeplitz.hpp"

namespace fastsdr {

struct DirectSolveResult {
  std::vector<std::vector<double>> solutions;
  /// Extra diagonal loading that was needed for the factorization to
  /// succeed (0 when the operator factored as given).
  double extra_loading = 0.0;
};

/// Materializes the operator and solves with a Cholesky factorization,
/// escalating diagonal loading when the factorization fails. Throws
/// SingularSystem when every loading fails.
DirectSolveResult direct_solve_toeplitz(const SymmetricToeplitz& op,
                                        const std::vector<std::vector<double>>& rhs);
DirectSolveResult direct_solve_toeplitz(const BlockToeplitz& op,
                                        const std::vector<std::vector<double>>& rhs);

/// Levinson recursion, O(L^2) per right-hand side. Requires all leading
/// principal minors to be nonsingular; throws LevinsonBreakdown otherwise.
std::vector<std::vector<double>> levinson_solve(const SymmetricToeplitz& op,
                                                const std::vector<std::vector<double>>& rhs);

}  // namespace fastsdr
