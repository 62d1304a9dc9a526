// Regenerates the committed CLI fixture: two mono reference WAVs, one
// two-channel estimate WAV and expected.json with the metrics computed by
// the dense oracle.
//
//   make_fixture <output-dir>

#include <fstream>
#include <iostream>
#include <random>

#include "cli/report.hpp"
#include "cli/wav.hpp"
#include "fastsdr/error.hpp"
#include "fastsdr/oracle.hpp"
#include "fastsdr/synthetic.hpp"

using namespace fastsdr;

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: make_fixture <output-dir>\n";
    return 2;
  }
  const std::string dir = argv[1];
  constexpr std::uint64_t kSeed = 20240917;
  constexpr std::size_t kLength = 2000;
  constexpr std::size_t kFilterLength = 64;

  std::mt19937_64 rng(kSeed);
  const auto refs = synthetic::ar1_sources(2, kLength, 0.9, rng);
  synthetic::MixtureOptions opts;
  opts.taps = 24;
  const auto spec = synthetic::random_mixture_spec(refs, 2, opts, rng);
  const auto ests = oracle::generate_mixture(refs, spec, kSeed);

  try {
    for (std::size_t k = 0; k < 2; ++k) {
      const auto mono = MultichannelSignal::from_channels(
          {std::vector<double>(refs.channel(k).begin(), refs.channel(k).end())}, refs.sample_rate());
      cli::write_wav(dir + "/ref" + std::to_string(k) + ".wav", mono);
    }
    cli::write_wav(dir + "/est.wav", ests);
  } catch (const Error& e) {
    std::cerr << e.what() << '\n';
    return 2;
  }

  const auto r = oracle::reference_bss_eval(refs, ests, kFilterLength);
  cli::Json doc;
  doc["seed"] = kSeed;
  doc["filter_length"] = kFilterLength;
  for (const char* name : {"sdr", "sir"}) {
    const RealMatrix& m = std::string(name) == "sdr" ? r.sdr : r.sir;
    cli::Json rows = cli::Json::array();
    for (std::size_t k = 0; k < 2; ++k) rows.push_back({m(k, 0), m(k, 1)});
    doc[name] = rows;
  }
  doc["sar"] = {r.sar(0, 0), r.sar(0, 1)};
  std::ofstream out(dir + "/expected.json");
  out << doc.dump(2) << '\n';
  return out ? 0 : 2;
}
