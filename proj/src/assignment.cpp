#include "fastsdr/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fastsdr/error.hpp"

namespace fastsdr {

// Shortest augmenting path formulation with row/column potentials,
// O(n^3).
std::vector<std::size_t> hungarian_min_cost(const RealMatrix& cost) {
  const std::size_t n = cost.rows;
  if (cost.cols != n) throw Error(ErrorCode::kDimensionMismatch, "hungarian_min_cost needs a square matrix");
  const double inf = std::numeric_limits<double>::infinity();
  // 1-based with column 0 as the virtual root.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), min_to(n + 1);
  std::vector<std::size_t> owner(n + 1, 0), way(n + 1, 0);
  std::vector<bool> used(n + 1);
  for (std::size_t i = 1; i <= n; ++i) {
    owner[0] = i;
    std::size_t col = 0;
    std::fill(min_to.begin(), min_to.end(), inf);
    std::fill(used.begin(), used.end(), false);
    do {
      used[col] = true;
      const std::size_t row = owner[col];
      double delta = inf;
      std::size_t next = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double reduced = cost(row - 1, j - 1) - u[row] - v[j];
        if (reduced < min_to[j]) {
          min_to[j] = reduced;
          way[j] = col;
        }
        if (min_to[j] < delta) {
          delta = min_to[j];
          next = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[owner[j]] += delta;
          v[j] -= delta;
        } else {
          min_to[j] -= delta;
        }
      }
      col = next;
    } while (owner[col] != 0);
    do {
      const std::size_t prev = way[col];
      owner[col] = owner[prev];
      col = prev;
    } while (col != 0);
  }
  std::vector<std::size_t> row_to_col(n);
  for (std::size_t j = 1; j <= n; ++j) row_to_col[owner[j] - 1] = j - 1;
  return row_to_col;
}

namespace {

// Best total over rows [first_row, n) restricted to columns not in `taken`.
double best_completion(const RealMatrix& profit, std::size_t first_row,
                       const std::vector<bool>& taken) {
  std::vector<std::size_t> rows, cols;
  for (std::size_t r = first_row; r < profit.rows; ++r) rows.push_back(r);
  for (std::size_t c = 0; c < profit.cols; ++c) {
    if (!taken[c]) cols.push_back(c);
  }
  if (rows.empty()) return 0.0;
  RealMatrix cost(rows.size(), cols.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < cols.size(); ++j) cost(i, j) = -profit(rows[i], cols[j]);
  }
  const auto match = hungarian_min_cost(cost);
  double total = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i) total += profit(rows[i], cols[match[i]]);
  return total;
}

}  // namespace

Assignment solve_assignment(const RealMatrix& profits) {
  const std::size_t K = profits.rows, M = profits.cols;
  if (K == 0 || M == 0) throw Error(ErrorCode::kEmptyInput, "empty profit matrix");
  for (double p : profits.values) {
    if (!std::isfinite(p)) throw Error(ErrorCode::kNonFiniteSample, "profit matrix has non-finite entries");
  }
  const std::size_t n = std::max(K, M);
  const double lowest = *std::min_element(profits.values.begin(), profits.values.end());
  RealMatrix padded(n, n, lowest - 1.0);
  double scale = 1.0;
  for (std::size_t k = 0; k < K; ++k) {
    for (std::size_t m = 0; m < M; ++m) {
      padded(k, m) = profits(k, m);
      scale = std::max(scale, std::abs(profits(k, m)));
    }
  }
  scale = std::max(scale, std::abs(lowest - 1.0));

  const std::vector<bool> none(n, false);
  const double optimum = best_completion(padded, 0, none);
  const double tol = 1e-12 * scale * static_cast<double>(n);

  // Fix rows in order to the smallest column that still admits an optimal
  // completion; this yields the lexicographically smallest optimal mapping.
  std::vector<bool> taken(n, false);
  std::vector<std::size_t> chosen(n);
  double prefix = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    std::size_t pick = n;
    for (std::size_t c = 0; c < n && pick == n; ++c) {
      if (taken[c]) continue;
      taken[c] = true;
      const double value = prefix + padded(r, c) + best_completion(padded, r + 1, taken);
      taken[c] = false;
      if (value >= optimum - tol) pick = c;
    }
    if (pick == n) {
      // Rounding left no candidate within tolerance; take the best one.
      double best = -std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < n; ++c) {
        if (taken[c]) continue;
        taken[c] = true;
        const double value = padded(r, c) + best_completion(padded, r + 1, taken);
        taken[c] = false;
        if (value > best) {
          best = value;
          pick = c;
        }
      }
    }
    taken[pick] = true;
    chosen[r] = pick;
    prefix += padded(r, pick);
  }

  Assignment out;
  out.mapping.assign(K, std::nullopt);
  for (std::size_t k = 0; k < K; ++k) {
    if (chosen[k] < M) {
      out.mapping[k] = chosen[k];
      out.total += profits(k, chosen[k]);
    }
  }
  return out;
}

}  // namespace fastsdr
