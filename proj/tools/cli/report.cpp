#include "cli/report.hpp"

#include <cstdio>
#include <sstream>

namespace fastsdr::cli {

namespace {

Json matrix_json(const std::optional<RealMatrix>& m) {
  if (!m) return nullptr;
  Json rows = Json::array();
  for (std::size_t r = 0; r < m->rows; ++r) {
    Json row = Json::array();
    for (std::size_t c = 0; c < m->cols; ++c) row.push_back((*m)(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json config_json(const ReportContext& ctx) {
  const EvalConfig& c = ctx.config;
  Json metrics = Json::array();
  if (c.metrics.sdr) metrics.push_back("sdr");
  if (c.metrics.sir) metrics.push_back("sir");
  if (c.metrics.sar) metrics.push_back("sar");
  Json j;
  j["filter_length"] = c.filter_length;
  j["solver"] = std::string(to_string(c.solver));
  j["iters"] = c.cgd_iters;
  j["tol"] = c.cgd_tol;
  j["precision"] = std::string(to_string(c.precision));
  j["metrics"] = std::move(metrics);
  j["permutation"] = c.resolve_permutation;
  j["clamp_epsilon"] = c.effective_clamp_epsilon();
  j["threads"] = c.threads;
  j["sample_rate"] = ctx.sample_rate;
  j["references"] = ctx.reference_paths;
  j["estimates"] = ctx.estimate_paths;
  return j;
}

Json diagnostics_json(const Diagnostics& d) {
  Json systems = Json::array();
  for (const auto& s : d.systems) {
    Json j;
    j["system"] = s.system;
    j["requested"] = std::string(to_string(s.requested));
    j["used"] = std::string(to_string(s.used));
    j["iterations"] = s.iterations;
    j["initial_residual"] = s.initial_residual;
    j["final_residual"] = s.final_residual;
    j["extra_loading"] = s.extra_loading;
    j["fallback"] = s.fallback.empty() ? Json(nullptr) : Json(s.fallback);
    systems.push_back(std::move(j));
  }
  Json clamps = Json::array();
  for (const auto& c : d.clamps) {
    Json j;
    j["quantity"] = c.quantity;
    j["reference"] = c.ref;
    j["estimate"] = c.est;
    j["raw"] = c.raw;
    j["clamped"] = c.clamped;
    clamps.push_back(std::move(j));
  }
  Json j;
  j["toeplitz_solves"] = d.toeplitz_solves;
  j["block_solves"] = d.block_solves;
  j["fallbacks"] = d.fallbacks;
  j["systems"] = std::move(systems);
  j["clamps"] = std::move(clamps);
  return j;
}

}  // namespace

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::vector<AlignedPair> aligned_pairs(const BssEvalResult& result) {
  std::vector<AlignedPair> out;
  if (result.permutation) {
    for (std::size_t k = 0; k < result.permutation->size(); ++k) {
      if (const auto& m = (*result.permutation)[k]) out.push_back({k, *m});
    }
  } else {
    for (std::size_t k = 0; k < std::min(result.num_refs, result.num_ests); ++k) out.push_back({k, k});
  }
  return out;
}

Json report_json(const BssEvalResult& result, const ReportContext& ctx) {
  Json results;
  results["sdr"] = matrix_json(result.sdr);
  results["sir"] = matrix_json(result.sir);
  results["sar"] = result.sar ? Json(*result.sar) : Json(nullptr);
  if (result.permutation) {
    Json perm = Json::array();
    for (const auto& m : *result.permutation) perm.push_back(m ? Json(*m) : Json(nullptr));
    results["permutation"] = std::move(perm);
  } else {
    results["permutation"] = nullptr;
  }
  Json aligned = Json::array();
  for (const auto& p : aligned_pairs(result)) {
    Json j;
    j["reference"] = p.reference;
    j["estimate"] = p.estimate;
    j["sdr"] = result.sdr ? Json((*result.sdr)(p.reference, p.estimate)) : Json(nullptr);
    j["sir"] = result.sir ? Json((*result.sir)(p.reference, p.estimate)) : Json(nullptr);
    j["sar"] = result.sar ? Json((*result.sar)[p.estimate]) : Json(nullptr);
    aligned.push_back(std::move(j));
  }
  results["aligned"] = std::move(aligned);

  Json doc;
  doc["config"] = config_json(ctx);
  doc["results"] = std::move(results);
  doc["diagnostics"] = diagnostics_json(result.diagnostics);
  return doc;
}

std::string report_csv(const BssEvalResult& result) {
  std::ostringstream out;
  auto cell = [&](bool present, double v) { return present ? format_double(v) : std::string(); };
  auto row = [&](const char* role, std::size_t k, std::optional<std::size_t> m) {
    out << role << ',' << k << ',';
    if (m) {
      out << *m << ',' << cell(result.sdr.has_value(), result.sdr ? (*result.sdr)(k, *m) : 0.0) << ','
          << cell(result.sir.has_value(), result.sir ? (*result.sir)(k, *m) : 0.0) << ','
          << cell(result.sar.has_value(), result.sar ? (*result.sar)[*m] : 0.0);
    } else {
      out << ",,,";
    }
    out << '\n';
  };
  out << "role,reference,estimate,sdr,sir,sar\n";
  for (std::size_t k = 0; k < result.num_refs; ++k) {
    for (std::size_t m = 0; m < result.num_ests; ++m) row("pair", k, m);
  }
  if (result.permutation) {
    for (std::size_t k = 0; k < result.num_refs; ++k) row("assignment", k, (*result.permutation)[k]);
  } else {
    for (const auto& p : aligned_pairs(result)) row("assignment", p.reference, p.estimate);
  }
  return out.str();
}

}  // namespace fastsdr::cli
