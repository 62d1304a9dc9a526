#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "fastsdr/metrics.hpp"

namespace fastsdr::cli {

using Json = nlohmann::ordered_json;

struct ReportContext {
  EvalConfig config;
  std::vector<std::string> reference_paths;
  std::vector<std::string> estimate_paths;
  double sample_rate = 0.0;
};

/// One reference/estimate pair selected by the permutation (or the identity
/// pairing when permutation solving is off).
struct AlignedPair {
  std::size_t reference = 0;
  std::size_t estimate = 0;
};

std::vector<AlignedPair> aligned_pairs(const BssEvalResult& result);

/// Keys: config, results {sdr, sir, sar, permutation, aligned},
/// diagnostics. Matrices are row-major with the reference index first;
/// metrics that were not requested are null.
Json report_json(const BssEvalResult& result, const ReportContext& ctx);

/// Columns role,reference,estimate,sdr,sir,sar. One role=pair row per
/// (reference, estimate) and one role=assignment row per reference.
std::string report_csv(const BssEvalResult& result);

/// %.17g, so parsing the text reproduces the double exactly.
std::string format_double(double x);

}  // namespace fastsdr::cli
