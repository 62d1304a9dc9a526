#include "fastsdr/types.hpp"

#include <cmath>
#include <sstream>

#include "fastsdr/error.hpp"

namespace fastsdr {

MultichannelSignal::MultichannelSignal(std::size_t channels, std::size_t length,
                                       std::vector<double> samples,
                                       double sample_rate)
    : channels_(channels),
      length_(length),
      sample_rate_(sample_rate),
      samples_(std::move(samples)) {
  if (channels_ == 0 || length_ == 0) {
    throw Error(ErrorCode::kEmptyInput, "signal needs at least one channel and one sample");
  }
  if (samples_.size() != channels_ * length_) {
    throw Error(ErrorCode::kDimensionMismatch, "sample buffer size does not match channels x length");
  }
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    if (!std::isfinite(samples_[i])) {
      std::ostringstream msg;
      msg << "non-finite sample in channel " << i / length_ << " at index " << i % length_;
      throw Error(ErrorCode::kNonFiniteSample, msg.str());
    }
  }
}

MultichannelSignal MultichannelSignal::from_channels(
    const std::vector<std::vector<double>>& channels, double sample_rate) {
  if (channels.empty() || channels.front().empty()) {
    throw Error(ErrorCode::kEmptyInput, "signal needs at least one channel and one sample");
  }
  const std::size_t length = channels.front().size();
  std::vector<double> samples;
  samples.reserve(channels.size() * length);
  for (const auto& ch : channels) {
    if (ch.size() != length) {
      throw Error(ErrorCode::kLengthMismatch, "channels have different lengths");
    }
    samples.insert(samples.end(), ch.begin(), ch.end());
  }
  return MultichannelSignal(channels.size(), length, std::move(samples), sample_rate);
}

MultichannelSignal MultichannelSignal::reordered(std::span<const std::size_t> order) const {
  std::vector<double> out;
  out.reserve(order.size() * length_);
  for (std::size_t c : order) {
    if (c >= channels_) throw Error(ErrorCode::kDimensionMismatch, "channel index out of range");
    auto ch = channel(c);
    out.insert(out.end(), ch.begin(), ch.end());
  }
  return MultichannelSignal(order.size(), length_, std::move(out), sample_rate_);
}

std::string_view to_string(Solver s) {
  switch (s) {
    case Solver::kDirect: return "direct";
    case Solver::kCgd: return "cgd";
    case Solver::kLevinson: return "levinson";
  }
  return "unknown";
}

std::string_view to_string(Precision p) {
  return p == Precision::kSingle ? "f32" : "f64";
}

std::optional<Solver> parse_solver(std::string_view name) {
  if (name == "direct" || name == "solve") return Solver::kDirect;
  if (name == "cgd") return Solver::kCgd;
  if (name == "levinson") return Solver::kLevinson;
  return std::nullopt;
}

std::optional<Precision> parse_precision(std::string_view name) {
  if (name == "f32" || name == "single") return Precision::kSingle;
  if (name == "f64" || name == "double") return Precision::kDouble;
  return std::nullopt;
}

std::optional<MetricSet> parse_metric_set(std::string_view list) {
  MetricSet m{false, false, false};
  std::size_t pos = 0;
  while (pos <= list.size()) {
    std::size_t end = list.find(',', pos);
    if (end == std::string_view::npos) end = list.size();
    std::string_view item = list.substr(pos, end - pos);
    if (item == "sdr") {
      m.sdr = true;
    } else if (item == "sir") {
      m.sir = true;
    } else if (item == "sar") {
      m.sar = true;
    } else if (!item.empty()) {
      return std::nullopt;
    }
    pos = end + 1;
  }
  if (!m.any()) return std::nullopt;
  return m;
}

std::string to_string(const MetricSet& m) {
  std::string out;
  auto add = [&](bool on, const char* name) {
    if (!on) return;
    if (!out.empty()) out += ",";
    out += name;
  };
  add(m.sdr, "sdr");
  add(m.sir, "sir");
  add(m.sar, "sar");
  return out;
}

double EvalConfig::effective_clamp_epsilon() const {
  if (clamp_epsilon) return *clamp_epsilon;
  return precision == Precision::kSingle ? 1e-7 : 1e-12;
}

void EvalConfig::validate() const {
  if (filter_length < 1) throw Error(ErrorCode::kInvalidConfig, "filter length must be at least 1");
  if (solver == Solver::kCgd && cgd_iters < 1) {
    throw Error(ErrorCode::kInvalidConfig, "cgd needs at least one iteration");
  }
  if (!(cgd_tol >= 0.0)) throw Error(ErrorCode::kInvalidConfig, "cgd tolerance must be nonnegative");
  const double eps = effective_clamp_epsilon();
  if (!(eps > 0.0 && eps < 0.5)) {
    throw Error(ErrorCode::kInvalidConfig, "clamp epsilon must lie in (0, 0.5)");
  }
  if (!metrics.any()) throw Error(ErrorCode::kInvalidConfig, "no metric requested");
}

MultichannelSignal normalize_unit_norm(const MultichannelSignal& signal) {
  std::vector<double> out(signal.data().begin(), signal.data().end());
  const std::size_t T = signal.length();
  for (std::size_t c = 0; c < signal.channels(); ++c) {
    double energy = 0.0;
    for (double v : signal.channel(c)) energy += v * v;
    if (energy == 0.0) {
      throw Error(ErrorCode::kZeroSignal, "channel " + std::to_string(c) + " is identically zero");
    }
    const double inv = 1.0 / std::sqrt(energy);
    for (std::size_t t = 0; t < T; ++t) out[c * T + t] *= inv;
  }
  return MultichannelSignal(signal.channels(), T, std::move(out), signal.sample_rate());
}

void validate_pairing(const MultichannelSignal& references,
                      const MultichannelSignal& estimates,
                      std::size_t filter_length) {
  if (references.empty() || estimates.empty()) {
    throw Error(ErrorCode::kEmptyInput, "need at least one reference and one estimate");
  }
  if (references.length() != estimates.length()) {
    std::ostringstream msg;
    msg << "references have " << references.length() << " samples, estimates have "
        << estimates.length();
    throw Error(ErrorCode::kLengthMismatch, msg.str());
  }
  if (filter_length == 0) throw Error(ErrorCode::kInvalidConfig, "filter length must be at least 1");
  if (references.length() <= filter_length) {
    std::ostringstream msg;
    msg << "filter length " << filter_length << " is not shorter than the signal ("
        << references.length() << " samples)";
    throw Error(ErrorCode::kFilterTooLong, msg.str());
  }
}

void round_to_precision(std::span<double> values, Precision p) {
  if (p != Precision::kSingle) return;
  for (double& v : values) v = static_cast<double>(static_cast<float>(v));
}

}  // namespace fastsdr
