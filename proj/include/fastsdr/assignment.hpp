#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "fastsdr/matrix.hpp"

namespace fastsdr {

/// mapping[k] is the estimate assigned to reference k, or nullopt when
/// there are more references than estimates and k is left unmatched.
using Permutation = std::vector<std::optional<std::size_t>>;

struct Assignment {
  Permutation mapping;
  /// Sum of the selected profits, accumulated in reference order.
  double total = 0.0;
};

/// Maximum-profit injective matching between the rows (references) and
/// columns (estimates) of `profits` via the Hungarian algorithm. Among
/// optimal matchings the lexicographically smallest mapping is returned.
Assignment solve_assignment(const RealMatrix& profits);

/// Minimum-cost perfect matching of a square matrix; returns row -> column.
std::vector<std::size_t> hungarian_min_cost(const RealMatrix& cost);

}  // namespace fastsdr
