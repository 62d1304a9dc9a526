#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace fastsdr {

/// Channels x samples real waveform. Samples are stored channel-major and
/// never change after construction.
class MultichannelSignal {
 public:
  MultichannelSignal() = default;

  /// `samples` holds `channels * length` values, channel after channel.
  /// Throws EmptyInput for zero channels/length and NonFiniteSample for
  /// NaN/Inf.
  MultichannelSignal(std::size_t channels, std::size_t length,
                     std::vector<double> samples, double sample_rate = 16000.0);

  static MultichannelSignal from_channels(
      const std::vector<std::vector<double>>& channels,
      double sample_rate = 16000.0);

  std::size_t channels() const { return channels_; }
  std::size_t length() const { return length_; }
  double sample_rate() const { return sample_rate_; }
  bool empty() const { return channels_ == 0; }

  std::span<const double> channel(std::size_t c) const {
    return {samples_.data() + c * length_, length_};
  }
  std::span<const double> data() const { return samples_; }

  /// Copy with channels reordered so that output channel i is input
  /// channel `order[i]`.
  MultichannelSignal reordered(std::span<const std::size_t> order) const;

 private:
  std::size_t channels_ = 0;
  std::size_t length_ = 0;
  double sample_rate_ = 0.0;
  std::vector<double> samples_;
};

enum class Solver { kDirect, kCgd, kLevinson };
enum class Precision { kSingle, kDouble };

std::string_view to_string(Solver s);
std::string_view to_string(Precision p);
std::optional<Solver> parse_solver(std::string_view name);
std::optional<Precision> parse_precision(std::string_view name);

struct MetricSet {
  bool sdr = true;
  bool sir = true;
  bool sar = true;

  bool needs_joint_system() const { return sir || sar; }
  bool any() const { return sdr || sir || sar; }
};

/// Parses "sdr,sir,sar" style lists; nullopt on unknown names.
std::optional<MetricSet> parse_metric_set(std::string_view list);
std::string to_string(const MetricSet& m);

struct EvalConfig {
  std::size_t filter_length = 512;
  Solver solver = Solver::kCgd;
  std::size_t cgd_iters = 10;
  /// 0 means fixed-iteration mode.
  double cgd_tol = 0.0;
  Precision precision = Precision::kDouble;
  MetricSet metrics;
  bool resolve_permutation = true;
  /// Defaults to 1e-12 in double and 1e-7 in single precision.
  std::optional<double> clamp_epsilon;
  std::size_t threads = 1;

  double effective_clamp_epsilon() const;

  /// Throws InvalidConfig when a field is out of range.
  void validate() const;
};

/// Scales each channel to unit Euclidean norm. Throws ZeroSignal naming
/// the first all-zero channel.
MultichannelSignal normalize_unit_norm(const MultichannelSignal& signal);

/// Checks that the two sets can be evaluated with `filter_length` taps.
void validate_pairing(const MultichannelSignal& references,
                      const MultichannelSignal& estimates,
                      std::size_t filter_length);

/// Rounds values to float when `p` is single precision; no-op otherwise.
void round_to_precision(std::span<double> values, Precision p);

}  // namespace fastsdr
