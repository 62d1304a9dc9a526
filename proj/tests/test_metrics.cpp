#include "doctest.h"

#include <Eigen/Dense>

#include <random>

#include "fastsdr/error.hpp"
#include "fastsdr/metrics.hpp"
#include "fastsdr/oracle.hpp"
#include "fastsdr/synthetic.hpp"
#include "support/test_oracles.hpp"

using namespace fastsdr;

namespace {

MultichannelSignal random_signal(std::size_t channels, std::size_t length, std::mt19937_64& rng) {
  std::vector<std::vector<double>> ch;
  for (std::size_t c = 0; c < channels; ++c) ch.push_back(testing::random_vector(length, rng));
  return MultichannelSignal::from_channels(ch);
}

EvalConfig direct_config(std::size_t L) {
  EvalConfig cfg;
  cfg.filter_length = L;
  cfg.solver = Solver::kDirect;
  return cfg;
}

CorrelationSet normalized_correlations(const MultichannelSignal& refs, const MultichannelSignal& ests,
                                       std::size_t L) {
  return compute_correlations(normalize_unit_norm(refs), normalize_unit_norm(ests), L);
}

// Least-squares filter of the padded estimate on the shift matrix of the
// given references, by dense normal equations.
Eigen::VectorXd dense_filter(const Eigen::MatrixXd& a, const Eigen::VectorXd& y) {
  return (a.transpose() * a).ldlt().solve(a.transpose() * y);
}

double max_abs(const RealMatrix& a, const RealMatrix& b) {
  return testing::max_abs_diff(a.values, b.values);
}

}  // namespace

TEST_CASE("db_map") {
  CHECK(db_map(0.5) == 0.0);
  CHECK(db_map(1.0 - 1e-12) == doctest::Approx(120.0).epsilon(1e-4));
  CHECK(db_map(1e-12) == doctest::Approx(-120.0).epsilon(1e-4));
  for (double x : {0.01, 0.2, 0.37, 0.9}) CHECK(std::abs(db_map(x) + db_map(1.0 - x)) < 1e-12);
}

TEST_CASE("filter of an estimate equal to its reference is a unit impulse") {
  std::mt19937_64 rng(1);
  auto refs = random_signal(1, 2000, rng);
  auto corr = normalized_correlations(refs, refs, 16);
  auto f = compute_filters_sdr(corr, direct_config(16));
  std::vector<double> impulse(16, 0.0);
  impulse[0] = 1.0;
  CHECK(testing::max_abs_diff(f.h_at(0, 0), impulse) < 1e-6);
}

TEST_CASE("filter of a one-sample delay is a delayed impulse") {
  std::mt19937_64 rng(2);
  const std::size_t T = 4000;
  auto s = testing::random_vector(T, rng);
  std::vector<double> delayed(T, 0.0);
  std::copy(s.begin(), s.end() - 1, delayed.begin() + 1);
  auto refs = MultichannelSignal::from_channels({s});
  auto ests = MultichannelSignal::from_channels({delayed});
  auto corr = normalized_correlations(refs, ests, 8);
  for (Solver solver : {Solver::kDirect, Solver::kCgd, Solver::kLevinson}) {
    auto cfg = direct_config(8);
    cfg.solver = solver;
    cfg.cgd_iters = 50;
    auto f = compute_filters_sdr(corr, cfg);
    std::vector<double> expected(8, 0.0);
    expected[1] = 1.0;
    CHECK(testing::max_abs_diff(f.h_at(0, 0), expected) < 1e-3);
  }
}

TEST_CASE("filters match dense least squares") {
  std::mt19937_64 rng(3);
  const std::size_t K = 3, M = 2, T = 200, L = 6;
  auto refs = normalize_unit_norm(random_signal(K, T, rng));
  auto ests = normalize_unit_norm(random_signal(M, T, rng));
  auto corr = compute_correlations(refs, ests, L);
  auto h = compute_filters_sdr(corr, direct_config(L));
  auto g = compute_filters_sir(corr, nullptr, direct_config(L));

  Eigen::MatrixXd all(T + L - 1, K * L);
  for (std::size_t k = 0; k < K; ++k) all.middleCols(k * L, L) = oracle::shift_matrix(refs.channel(k), L);
  for (std::size_t m = 0; m < M; ++m) {
    const auto y = oracle::pad_estimate(ests.channel(m), L);
    const Eigen::VectorXd joint = dense_filter(all, y);
    for (std::size_t k = 0; k < K; ++k) {
      const Eigen::VectorXd single = dense_filter(all.middleCols(k * L, L), y);
      for (std::size_t j = 0; j < L; ++j) {
        CHECK(std::abs(h.h_at(k, m)[j] - single(j)) < 1e-8);
        CHECK(std::abs(g.g_at(k, m)[j] - joint(k * L + j)) < 1e-8);
      }
    }
  }
}

TEST_CASE("joint filter reduces to the per-reference filter") {
  std::mt19937_64 rng(4);
  SUBCASE("single reference") {
    auto refs = random_signal(1, 300, rng);
    auto ests = random_signal(2, 300, rng);
    auto corr = normalized_correlations(refs, ests, 10);
    auto h = compute_filters_sdr(corr, direct_config(10));
    auto g = compute_filters_sir(corr, nullptr, direct_config(10));
    for (std::size_t m = 0; m < 2; ++m) CHECK(testing::max_abs_diff(h.h_at(0, m), g.g_at(0, m)) < 1e-10);
  }
  SUBCASE("references with disjoint supports") {
    const std::size_t T = 400, L = 5;
    auto a = testing::random_vector(T, rng), b = testing::random_vector(T, rng);
    std::fill(a.begin() + 150, a.end(), 0.0);
    std::fill(b.begin(), b.begin() + 250, 0.0);
    auto refs = MultichannelSignal::from_channels({a, b});
    auto ests = random_signal(2, T, rng);
    auto corr = normalized_correlations(refs, ests, L);
    auto h = compute_filters_sdr(corr, direct_config(L));
    auto g = compute_filters_sir(corr, nullptr, direct_config(L));
    for (std::size_t k = 0; k < 2; ++k) {
      for (std::size_t m = 0; m < 2; ++m) CHECK(testing::max_abs_diff(h.h_at(k, m), g.g_at(k, m)) < 1e-10);
    }
  }
}

TEST_CASE("cosine metrics") {
  std::mt19937_64 rng(5);
  SUBCASE("estimate equal to reference") {
    auto refs = random_signal(2, 1000, rng);
    auto corr = normalized_correlations(refs, refs, 8);
    auto f = compute_filters_sdr(corr, direct_config(8));
    auto cos = cosine_metrics(corr, f, 1e-12);
    CHECK(cos.c(0, 0) >= 1.0 - 1e-6);
    CHECK(cos.c(1, 1) >= 1.0 - 1e-6);
  }
  SUBCASE("orthogonal estimate gives zero cosines") {
    const std::size_t T = 300, L = 4;
    auto a = testing::random_vector(T, rng), e = testing::random_vector(T, rng);
    std::fill(a.begin() + 100, a.end(), 0.0);
    std::fill(e.begin(), e.begin() + 200, 0.0);
    auto refs = MultichannelSignal::from_channels({a});
    auto ests = MultichannelSignal::from_channels({e});
    auto corr = normalized_correlations(refs, ests, L);
    DistortionFilters f = compute_filters_sdr(corr, direct_config(L));
    f.g = compute_filters_sir(corr, &f, direct_config(L)).g;
    Diagnostics diag;
    auto cos = cosine_metrics(corr, f, 1e-12, &diag);
    CHECK(std::abs(cos.c_raw(0, 0)) < 1e-15);
    CHECK(std::abs(cos.d_raw[0]) < 1e-15);
    CHECK(cos.c(0, 0) == 1e-12);
    CHECK(diag.clamps.size() == 2);
  }
  SUBCASE("c equals the squared norm of the projection") {
    auto refs = normalize_unit_norm(random_signal(2, 150, rng));
    auto ests = normalize_unit_norm(random_signal(2, 150, rng));
    const std::size_t L = 7;
    auto corr = compute_correlations(refs, ests, L);
    DistortionFilters f = compute_filters_sdr(corr, direct_config(L));
    f.g = compute_filters_sir(corr, &f, direct_config(L)).g;
    auto cos = cosine_metrics(corr, f, 1e-12);
    auto proj = oracle::build_projections(refs, L);
    for (std::size_t m = 0; m < 2; ++m) {
      const auto y = oracle::pad_estimate(ests.channel(m), L);
      for (std::size_t k = 0; k < 2; ++k) CHECK(std::abs(cos.c(k, m) - (proj.per_source[k] * y).squaredNorm()) < 1e-8);
      CHECK(std::abs(cos.d[m] - (proj.joint * y).squaredNorm()) < 1e-8);
      for (std::size_t k = 0; k < 2; ++k) {
        CHECK(cos.c(k, m) <= cos.d[m] + 1e-8);
        CHECK(std::abs(std::cos(cos.alpha(k, m)) * std::cos(cos.alpha(k, m)) - cos.c(k, m)) < 1e-12);
      }
    }
  }
}

TEST_CASE("bss_eval on identical inputs hits the clamp ceiling") {
  std::mt19937_64 rng(6);
  auto refs = random_signal(2, 3000, rng);
  for (Precision p : {Precision::kDouble, Precision::kSingle}) {
    EvalConfig cfg = direct_config(32);
    cfg.precision = p;
    cfg.metrics = {true, true, true};
    auto res = bss_eval(refs, refs, cfg);
    const double ceiling = db_map(1.0 - cfg.effective_clamp_epsilon());
    for (std::size_t k = 0; k < 2; ++k) {
      CHECK((*res.sdr)(k, k) >= ceiling - 1e-3);
      CHECK((*res.sdr)(k, k) <= ceiling);
    }
    CHECK(*res.permutation == Permutation{0, 1});
  }
}

TEST_CASE("bss_eval recovers swapped channels") {
  std::mt19937_64 rng(7);
  auto inst = synthetic::white_instance(2, 2, 2000, {}, rng);
  auto swapped = inst.estimates.reordered(std::vector<std::size_t>{1, 0});
  EvalConfig cfg;
  cfg.filter_length = 16;
  cfg.metrics = {true, true, true};
  auto res = bss_eval(inst.references, swapped, cfg);
  CHECK(*res.permutation == Permutation{1, 0});
}

TEST_CASE("fast path equals the explicit projection computation") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 10; ++trial) {
    auto inst = synthetic::ar1_instance(2, 3, 300, 0.7, {.taps = 4}, rng);
    const std::size_t L = 8;
    EvalConfig cfg = direct_config(L);
    cfg.metrics = {true, true, true};
    auto fast = bss_eval(inst.references, inst.estimates, cfg);
    auto ref = oracle::reference_bss_eval(inst.references, inst.estimates, L);
    CHECK(max_abs(*fast.sdr, ref.sdr) < 1e-8);
    CHECK(max_abs(*fast.sir, ref.sir) < 1e-8);
    for (std::size_t m = 0; m < 3; ++m) CHECK(std::abs((*fast.sar)[m] - ref.sar(0, m)) < 1e-8);
  }
}

TEST_CASE("scale-invariant SDR matches the closed form") {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> noise(0.0, 0.5);
  for (int trial = 0; trial < 20; ++trial) {
    auto s = testing::random_vector(500, rng);
    auto e = s;
    for (auto& v : e) v = 0.8 * v + noise(rng);
    auto res = si_sdr(MultichannelSignal::from_channels({s}), MultichannelSignal::from_channels({e}));
    CHECK(std::abs((*res.sdr)(0, 0) - testing::closed_form_si_sdr(s, e)) < 1e-8);
  }
  // Pure scaling of the reference is perfect.
  auto s = testing::random_vector(100, rng);
  auto e = s;
  for (auto& v : e) v *= -3.0;
  auto res = si_sdr(MultichannelSignal::from_channels({s}), MultichannelSignal::from_channels({e}));
  CHECK((*res.sdr)(0, 0) >= db_map(1.0 - 1e-12) - 1e-3);
}

TEST_CASE("SDR decreases as noise grows") {
  std::mt19937_64 rng(10);
  auto s = testing::random_vector(4000, rng);
  auto n = testing::random_vector(4000, rng);
  double previous = INFINITY;
  for (double level : {0.01, 0.05, 0.2, 0.5, 1.0, 3.0}) {
    auto e = s;
    for (std::size_t t = 0; t < e.size(); ++t) e[t] += level * n[t];
    auto res = bss_eval(MultichannelSignal::from_channels({s}), MultichannelSignal::from_channels({e}), direct_config(32));
    const double sdr = (*res.sdr)(0, 0);
    CHECK(sdr < previous);
    previous = sdr;
  }
}

TEST_CASE("invariances") {
  std::mt19937_64 rng(11);
  auto inst = synthetic::white_instance(3, 3, 1500, {}, rng);
  EvalConfig cfg = direct_config(12);
  cfg.metrics = {true, true, true};
  auto base = bss_eval(inst.references, inst.estimates, cfg);

  SUBCASE("permuting estimates permutes columns") {
    const std::vector<std::size_t> order{2, 0, 1};
    auto res = bss_eval(inst.references, inst.estimates.reordered(order), cfg);
    for (std::size_t k = 0; k < 3; ++k) {
      for (std::size_t j = 0; j < 3; ++j) {
        CHECK(std::abs((*res.sdr)(k, j) - (*base.sdr)(k, order[j])) < 1e-9);
        CHECK(std::abs((*res.sir)(k, j) - (*base.sir)(k, order[j])) < 1e-9);
      }
      CHECK(order[res.permutation->at(k).value()] == base.permutation->at(k).value());
    }
  }
  SUBCASE("per-channel rescaling changes nothing") {
    std::vector<double> r(inst.references.data().begin(), inst.references.data().end());
    std::vector<double> e(inst.estimates.data().begin(), inst.estimates.data().end());
    const double scales[3] = {0.01, 7.0, 300.0};
    for (std::size_t c = 0; c < 3; ++c) {
      for (std::size_t t = 0; t < 1500; ++t) {
        r[c * 1500 + t] *= scales[c];
        e[c * 1500 + t] *= scales[2 - c];
      }
    }
    auto res = bss_eval(MultichannelSignal(3, 1500, r), MultichannelSignal(3, 1500, e), cfg);
    CHECK(max_abs(*res.sdr, *base.sdr) < 1e-8);
    CHECK(max_abs(*res.sir, *base.sir) < 1e-8);
    CHECK(testing::max_abs_diff(*res.sar, *base.sar) < 1e-8);
  }
}

TEST_CASE("SDR-only evaluation skips the joint system") {
  std::mt19937_64 rng(12);
  auto inst = synthetic::white_instance(2, 2, 1000, {}, rng);
  EvalConfig cfg;
  cfg.filter_length = 16;
  cfg.metrics = {true, false, false};
  auto res = bss_eval(inst.references, inst.estimates, cfg);
  CHECK(res.diagnostics.block_solves == 0);
  CHECK(res.diagnostics.toeplitz_solves == 2);
  CHECK_FALSE(res.sir.has_value());
  CHECK_FALSE(res.sar.has_value());
  CHECK(res.sdr.has_value());
}

TEST_CASE("warm start lowers the initial residual of the joint system") {
  std::mt19937_64 rng(13);
  int better = 0;
  for (int trial = 0; trial < 100; ++trial) {
    auto inst = synthetic::ar1_instance(2, 2, 1000, 0.8, {}, rng);
    auto corr = normalized_correlations(inst.references, inst.estimates, 16);
    EvalConfig cfg;
    cfg.filter_length = 16;
    Diagnostics warm_diag, cold_diag;
    auto h = compute_filters_sdr(corr, cfg);
    compute_filters_sir(corr, &h, cfg, &warm_diag);
    compute_filters_sir(corr, nullptr, cfg, &cold_diag);
    if (warm_diag.systems[0].initial_residual <= cold_diag.systems[0].initial_residual) ++better;
  }
  CHECK(better >= 95);
}

TEST_CASE("solver choices agree and report themselves") {
  std::mt19937_64 rng(14);
  auto inst = synthetic::ar1_instance(2, 2, 4000, 0.9, {}, rng);
  EvalConfig cfg;
  cfg.filter_length = 64;
  cfg.metrics = {true, true, true};
  cfg.solver = Solver::kDirect;
  auto direct = bss_eval(inst.references, inst.estimates, cfg);
  cfg.solver = Solver::kLevinson;
  auto lev = bss_eval(inst.references, inst.estimates, cfg);
  cfg.solver = Solver::kCgd;
  cfg.cgd_iters = 200;
  cfg.cgd_tol = 1e-13;
  auto cgd = bss_eval(inst.references, inst.estimates, cfg);
  CHECK(max_abs(*lev.sdr, *direct.sdr) < 1e-6);
  CHECK(max_abs(*cgd.sdr, *direct.sdr) < 1e-6);
  CHECK(max_abs(*cgd.sir, *direct.sir) < 1e-6);
  const auto& block = lev.diagnostics.systems.back();
  CHECK(block.system == "block");
  CHECK(block.used == Solver::kDirect);
  CHECK_FALSE(block.fallback.empty());
  CHECK(cgd.diagnostics.systems.front().used == Solver::kCgd);
  CHECK(cgd.diagnostics.fallbacks == 0);
}

TEST_CASE("errors carry the failing stage") {
  std::mt19937_64 rng(15);
  auto refs = MultichannelSignal::from_channels({testing::random_vector(100, rng), std::vector<double>(100, 0.0)});
  auto ests = random_signal(2, 100, rng);
  try {
    bss_eval(refs, ests, direct_config(8));
    FAIL("expected ZeroSignal");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kZeroSignal);
    CHECK(e.stage() == "normalize");
  }
  try {
    bss_eval(ests, random_signal(2, 99, rng), direct_config(8));
    FAIL("expected LengthMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kLengthMismatch);
    CHECK(e.stage() == "validate");
  }
}
