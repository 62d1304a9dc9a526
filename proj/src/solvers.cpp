#include "fastsdr/solvers.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <sstream>

#include "fastsdr/error.hpp"

namespace fastsdr {

namespace {

DirectSolveResult dense_cholesky_solve(const Eigen::MatrixXd& a, double lag0,
                                       const std::vector<std::vector<double>>& rhs) {
  const auto n = a.rows();
  for (const auto& b : rhs) {
    if (static_cast<Eigen::Index>(b.size()) != n) {
      throw Error(ErrorCode::kDimensionMismatch, "right-hand side has wrong size");
    }
  }
  auto ladder = diagonal_loading_ladder(lag0, static_cast<std::size_t>(n));
  ladder.front() = 0.0;
  for (double loading : ladder) {
    Eigen::MatrixXd loaded = a;
    loaded.diagonal().array() += loading;
    Eigen::LLT<Eigen::MatrixXd> llt(loaded);
    if (llt.info() != Eigen::Success) continue;
    DirectSolveResult out;
    out.extra_loading = loading;
    out.solutions.reserve(rhs.size());
    for (const auto& b : rhs) {
      Eigen::VectorXd x = llt.solve(Eigen::Map<const Eigen::VectorXd>(b.data(), n));
      out.solutions.emplace_back(x.data(), x.data() + n);
    }
    return out;
  }
  std::ostringstream msg;
  msg << "Cholesky factorization of the " << n << "x" << n
      << " Gram matrix failed even with loading " << ladder.back();
  throw Error(ErrorCode::kSingularSystem, msg.str());
}

}  // namespace

DirectSolveResult direct_solve_toeplitz(const SymmetricToeplitz& op,
                                        const std::vector<std::vector<double>>& rhs) {
  return dense_cholesky_solve(op.dense(), op.first_column()[0], rhs);
}

DirectSolveResult direct_solve_toeplitz(const BlockToeplitz& op,
                                        const std::vector<std::vector<double>>& rhs) {
  double lag0 = 0.0;
  for (std::size_t k = 0; k < op.num_blocks(); ++k) {
    lag0 = std::max(lag0, op.generator(k, k)[op.block_size() - 1]);
  }
  return dense_cholesky_solve(op.dense(), lag0, rhs);
}

std::vector<std::vector<double>> levinson_solve(const SymmetricToeplitz& op,
                                                const std::vector<std::vector<double>>& rhs) {
  const std::size_t n = op.size();
  const auto col = op.first_column();
  const double r0 = col[0];
  const double tiny = 16.0 * std::numeric_limits<double>::epsilon();
  if (!(std::abs(r0) > 0.0) || !std::isfinite(r0)) {
    throw Error(ErrorCode::kLevinsonBreakdown, "leading minor r[0] is zero");
  }
  // Unit-diagonal form: r[i] / r0.
  std::vector<double> r(n);
  for (std::size_t i = 0; i < n; ++i) r[i] = col[i] / r0;

  std::vector<std::vector<double>> out;
  out.reserve(rhs.size());
  std::vector<double> y(n), x(n), tmp(n);
  for (const auto& b_in : rhs) {
    if (b_in.size() != n) throw Error(ErrorCode::kDimensionMismatch, "right-hand side has wrong size");
    x.assign(n, 0.0);
    x[0] = b_in[0] / r0;
    if (n > 1) {
      y[0] = -r[1];
      double alpha = -r[1];
      double beta = 1.0;
      for (std::size_t k = 1; k < n; ++k) {
        beta *= (1.0 - alpha * alpha);
        if (!(std::abs(beta) > tiny)) {
          std::ostringstream msg;
          msg << "reflection denominator vanished at order " << k;
          throw Error(ErrorCode::kLevinsonBreakdown, msg.str());
        }
        double acc = b_in[k] / r0;
        for (std::size_t i = 0; i < k; ++i) acc -= r[i + 1] * x[k - 1 - i];
        const double mu = acc / beta;
        for (std::size_t i = 0; i < k; ++i) tmp[i] = x[i] + mu * y[k - 1 - i];
        std::copy_n(tmp.begin(), k, x.begin());
        x[k] = mu;
        if (k + 1 < n) {
          double a = -r[k + 1];
          for (std::size_t i = 0; i < k; ++i) a -= r[i + 1] * y[k - 1 - i];
          alpha = a / beta;
          for (std::size_t i = 0; i < k; ++i) tmp[i] = y[i] + alpha * y[k - 1 - i];
          std::copy_n(tmp.begin(), k, y.begin());
          y[k] = alpha;
        }
      }
    }
    out.push_back(x);
  }
  return out;
}

}  // namespace fastsdr
