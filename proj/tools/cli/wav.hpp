#pragma once

#include <cstdint>
#include <string>

#include "fastsdr/types.hpp"

namespace fastsdr::cli {

enum class WavEncoding { kPcm16, kPcm24, kPcm32, kFloat32, kFloat64 };

/// Reads a RIFF/WAVE file. Integer PCM is scaled to [-1, 1). Throws Error
/// with kIo or kFormat.
MultichannelSignal read_wav(const std::string& path);

void write_wav(const std::string& path, const MultichannelSignal& signal,
               WavEncoding encoding = WavEncoding::kFloat64);

}  // namespace fastsdr::cli
