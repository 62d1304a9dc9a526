#include "fastsdr/oracle.hpp"

#include <random>
#include <sstream>

#include "fastsdr/error.hpp"
#include "fastsdr/metrics.hpp"
#include "fastsdr/toeplitz.hpp"

namespace fastsdr::oracle {

namespace {

void check_size(std::size_t T, std::size_t L) {
  if (T + L - 1 > kMaxPaddedLength) {
    std::ostringstream msg;
    msg << "oracle is limited to T + L - 1 <= " << kMaxPaddedLength << " (got " << T + L - 1 << ")";
    throw Error(ErrorCode::kOracleTooLarge, msg.str());
  }
}

// A (G + loading)^{-1} A' with the loading ladder of the direct solver.
Eigen::MatrixXd projector(const Eigen::MatrixXd& a, double lag0) {
  const Eigen::MatrixXd gram = a.transpose() * a;
  const auto n = static_cast<std::size_t>(gram.rows());
  for (double loading : diagonal_loading_ladder(lag0, n)) {
    Eigen::MatrixXd loaded = gram;
    loaded.diagonal().array() += loading;
    Eigen::LLT<Eigen::MatrixXd> llt(loaded);
    if (llt.info() != Eigen::Success) continue;
    return a * llt.solve(a.transpose());
  }
  throw Error(ErrorCode::kSingularGram, "Gram matrix of the shift matrix is singular");
}

}  // namespace

Eigen::MatrixXd shift_matrix(std::span<const double> s, std::size_t filter_length) {
  const std::size_t T = s.size(), L = filter_length;
  check_size(T, L);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(T + L - 1),
                                            static_cast<Eigen::Index>(L));
  for (std::size_t j = 0; j < L; ++j) {
    for (std::size_t t = 0; t < T; ++t) {
      a(static_cast<Eigen::Index>(t + j), static_cast<Eigen::Index>(j)) = s[t];
    }
  }
  return a;
}

Projections build_projections(const MultichannelSignal& references, std::size_t filter_length) {
  const std::size_t K = references.channels(), L = filter_length, T = references.length();
  check_size(T, L);
  const auto rows = static_cast<Eigen::Index>(T + L - 1);
  Eigen::MatrixXd all(rows, static_cast<Eigen::Index>(K * L));
  Projections out;
  double max_lag0 = 0.0;
  for (std::size_t k = 0; k < K; ++k) {
    const Eigen::MatrixXd a = shift_matrix(references.channel(k), L);
    all.middleCols(static_cast<Eigen::Index>(k * L), static_cast<Eigen::Index>(L)) = a;
    const double lag0 = a.col(0).squaredNorm();
    max_lag0 = std::max(max_lag0, lag0);
    out.per_source.push_back(projector(a, lag0));
  }
  out.joint = projector(all, max_lag0);
  return out;
}

Eigen::VectorXd pad_estimate(std::span<const double> estimate, std::size_t filter_length) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(estimate.size() + filter_length - 1));
  for (std::size_t t = 0; t < estimate.size(); ++t) v(static_cast<Eigen::Index>(t)) = estimate[t];
  return v;
}

Decomposition decompose(const Projections& proj, const Eigen::VectorXd& padded_estimate,
                        std::size_t k) {
  Decomposition d;
  d.s_target = proj.per_source.at(k) * padded_estimate;
  const Eigen::VectorXd joint = proj.joint * padded_estimate;
  d.e_interf = joint - d.s_target;
  d.e_artif = padded_estimate - joint;
  return d;
}

std::vector<Decomposition> decompose(const MultichannelSignal& references,
                                     std::span<const double> estimate, std::size_t filter_length) {
  const auto proj = build_projections(references, filter_length);
  const auto padded = pad_estimate(estimate, filter_length);
  std::vector<Decomposition> out;
  for (std::size_t k = 0; k < references.channels(); ++k) out.push_back(decompose(proj, padded, k));
  return out;
}

DecompositionMetrics metrics_via_decomposition(const Decomposition& d, double clamp_epsilon) {
  auto ratio_db = [clamp_epsilon](double num, double den) {
    const double total = num + den;
    const double x = total > 0.0 ? num / total : clamp_epsilon;
    return db_map(std::clamp(x, clamp_epsilon, 1.0 - clamp_epsilon));
  };
  DecompositionMetrics m;
  m.sdr = ratio_db(d.s_target.squaredNorm(), (d.e_interf + d.e_artif).squaredNorm());
  m.sir = ratio_db(d.s_target.squaredNorm(), d.e_interf.squaredNorm());
  m.sar = ratio_db((d.s_target + d.e_interf).squaredNorm(), d.e_artif.squaredNorm());
  return m;
}

ReferenceResult reference_bss_eval(const MultichannelSignal& references,
                                   const MultichannelSignal& estimates, std::size_t filter_length,
                                   double clamp_epsilon) {
  validate_pairing(references, estimates, filter_length);
  const auto refs = normalize_unit_norm(references);
  const auto ests = normalize_unit_norm(estimates);
  const std::size_t K = refs.channels(), M = ests.channels();
  const auto proj = build_projections(refs, filter_length);
  ReferenceResult out{RealMatrix(K, M), RealMatrix(K, M), RealMatrix(K, M)};
  for (std::size_t m = 0; m < M; ++m) {
    const auto padded = pad_estimate(ests.channel(m), filter_length);
    for (std::size_t k = 0; k < K; ++k) {
      const auto met = metrics_via_decomposition(decompose(proj, padded, k), clamp_epsilon);
      out.sdr(k, m) = met.sdr;
      out.sir(k, m) = met.sir;
      out.sar(k, m) = met.sar;
    }
  }
  return out;
}

double max_metric_deviation(const BssEvalResult& fast, const ReferenceResult& reference) {
  double worst = 0.0;
  for (std::size_t k = 0; k < fast.num_refs; ++k) {
    for (std::size_t m = 0; m < fast.num_ests; ++m) {
      if (fast.sdr) worst = std::max(worst, std::abs((*fast.sdr)(k, m) - reference.sdr(k, m)));
      if (fast.sir) worst = std::max(worst, std::abs((*fast.sir)(k, m) - reference.sir(k, m)));
      if (fast.sar) worst = std::max(worst, std::abs((*fast.sar)[m] - reference.sar(k, m)));
    }
  }
  return worst;
}

MultichannelSignal generate_mixture(const MultichannelSignal& references, const MixtureSpec& spec,
                                    std::uint64_t seed) {
  const std::size_t K = references.channels(), T = references.length(), M = spec.num_outputs;
  if (M == 0) throw Error(ErrorCode::kEmptyInput, "mixture needs at least one output");
  if (spec.filters.size() != M * K) throw Error(ErrorCode::kDimensionMismatch, "need M*K mixing filters");
  if (!spec.gains.empty() && spec.gains.size() != K) {
    throw Error(ErrorCode::kDimensionMismatch, "need one gain per source");
  }
  if (!spec.noise.empty() && spec.noise.size() != M) {
    throw Error(ErrorCode::kDimensionMismatch, "need one noise vector per output");
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> out(M * T, 0.0);
  for (std::size_t m = 0; m < M; ++m) {
    double* y = out.data() + m * T;
    for (std::size_t k = 0; k < K; ++k) {
      const auto s = references.channel(k);
      const double gain = spec.gains.empty() ? 1.0 : spec.gains[k];
      const auto& h = spec.filters[m * K + k];
      for (std::size_t t = 0; t < T; ++t) {
        double acc = 0.0;
        const std::size_t taps = std::min(h.size(), t + 1);
        for (std::size_t i = 0; i < taps; ++i) acc += h[i] * s[t - i];
        y[t] += gain * acc;
      }
    }
    if (!spec.noise.empty()) {
      if (spec.noise[m].size() != T) throw Error(ErrorCode::kLengthMismatch, "noise length differs from T");
      for (std::size_t t = 0; t < T; ++t) y[t] += spec.noise[m][t];
    } else if (spec.noise_std > 0.0) {
      for (std::size_t t = 0; t < T; ++t) y[t] += spec.noise_std * normal(rng);
    }
  }
  return MultichannelSignal(M, T, std::move(out), references.sample_rate());
}

}  // namespace fastsdr::oracle
