#include "fastsdr/cgd.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "fastsdr/error.hpp"
#include "fastsdr/parallel.hpp"

namespace fastsdr {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

CgdResult cgd_solve(const LinearOperator& matvec, const LinearOperator& precond,
                    std::span<const double> rhs, std::span<const double> init,
                    const CgdOptions& opts) {
  if (opts.max_iters < 1) throw Error(ErrorCode::kInvalidConfig, "cgd needs at least one iteration");
  const std::size_t n = rhs.size();
  if (!init.empty() && init.size() != n) {
    throw Error(ErrorCode::kDimensionMismatch, "cgd initial vector has wrong size");
  }
  CgdResult res;
  res.solution.assign(n, 0.0);
  if (!init.empty()) std::copy(init.begin(), init.end(), res.solution.begin());
  round_to_precision(res.solution, opts.precision);

  const double b_norm = std::sqrt(dot(rhs, rhs));
  if (b_norm == 0.0) {
    res.solution.assign(n, 0.0);
    res.converged = true;
    if (opts.record_residuals) res.residual_history.push_back(0.0);
    return res;
  }

  std::vector<double> r(n), z(n), p(n), ap(n);
  auto& x = res.solution;
  if (init.empty()) {
    std::copy(rhs.begin(), rhs.end(), r.begin());
  } else {
    matvec(x, ap);
    for (std::size_t i = 0; i < n; ++i) r[i] = rhs[i] - ap[i];
  }
  round_to_precision(r, opts.precision);

  auto precondition = [&] {
    if (precond) {
      precond(r, z);
      round_to_precision(z, opts.precision);
    } else {
      z = r;
    }
  };

  double rel = std::sqrt(dot(r, r)) / b_norm;
  res.initial_relative_residual = rel;
  if (opts.record_residuals) res.residual_history.push_back(rel);

  precondition();
  p = z;
  double rz = dot(r, z);
  // Curvatures this close to zero relative to the rhs mean the residual is
  // already at rounding level.
  const double tiny_residual = 64.0 * std::numeric_limits<double>::epsilon();

  for (std::size_t it = 0; it < opts.max_iters; ++it) {
    if (rel == 0.0 || (opts.rel_tol > 0.0 && rel <= opts.rel_tol)) break;
    if (!(rz > 0.0)) {
      if (rel <= tiny_residual) break;
      std::ostringstream msg;
      msg << "preconditioned residual curvature " << rz << " is not positive at iteration " << it;
      throw Error(ErrorCode::kBreakdownDetected, msg.str());
    }
    matvec(p, ap);
    const double pap = dot(p, ap);
    if (!(pap > 0.0)) {
      if (rel <= tiny_residual) break;
      std::ostringstream msg;
      msg << "direction curvature p'Ap = " << pap << " is not positive at iteration " << it;
      throw Error(ErrorCode::kBreakdownDetected, msg.str());
    }
    const double alpha = rz / pap;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * ap[i];
    }
    round_to_precision(x, opts.precision);
    round_to_precision(r, opts.precision);
    ++res.iterations;
    rel = std::sqrt(dot(r, r)) / b_norm;
    if (opts.record_residuals) res.residual_history.push_back(rel);

    precondition();
    const double rz_next = dot(r, z);
    const double beta = rz_next / rz;
    rz = rz_next;
    for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    round_to_precision(p, opts.precision);
  }
  res.relative_residual = rel;
  res.converged = rel == 0.0 || (opts.rel_tol > 0.0 && rel <= opts.rel_tol);
  return res;
}

std::vector<CgdResult> cgd_solve_many(const LinearOperator& matvec, const LinearOperator& precond,
                                      const std::vector<std::vector<double>>& rhs,
                                      const std::vector<std::vector<double>>& inits,
                                      const CgdOptions& opts, std::size_t threads) {
  if (!inits.empty() && inits.size() != rhs.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "need one initial vector per right-hand side");
  }
  std::vector<CgdResult> out(rhs.size());
  parallel_for(rhs.size(), threads, [&](std::size_t i) {
    std::span<const double> init;
    if (!inits.empty()) init = inits[i];
    out[i] = cgd_solve(matvec, precond, rhs[i], init, opts);
  });
  return out;
}

}  // namespace fastsdr
