#include "cli/wav.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <vector>

#include "fastsdr/error.hpp"

namespace fastsdr::cli {

namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::uint32_t le32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | static_cast<std::uint32_t>(p[1]) << 8 |
         static_cast<std::uint32_t>(p[2]) << 16 | static_cast<std::uint32_t>(p[3]) << 24;
}

std::uint16_t le16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | p[1] << 8);
}

[[noreturn]] void bad(const std::string& path, const std::string& why) {
  throw Error(ErrorCode::kFormat, path + ": " + why);
}

double decode(const unsigned char* p, std::uint16_t format, std::uint16_t bits) {
  if (format == kFormatFloat) {
    if (bits == 32) {
      float f;
      std::uint32_t u = le32(p);
      std::memcpy(&f, &u, 4);
      return f;
    }
    std::uint64_t u = static_cast<std::uint64_t>(le32(p)) | static_cast<std::uint64_t>(le32(p + 4)) << 32;
    double d;
    std::memcpy(&d, &u, 8);
    return d;
  }
  switch (bits) {
    case 16: return static_cast<std::int16_t>(le16(p)) / 32768.0;
    case 24: {
      std::int32_t v = p[0] | p[1] << 8 | p[2] << 16;
      if (v & 0x800000) v -= 0x1000000;
      return v / 8388608.0;
    }
    default: return static_cast<std::int32_t>(le32(p)) / 2147483648.0;
  }
}

void put16(std::vector<unsigned char>& out, std::uint16_t v) {
  out.push_back(static_cast<unsigned char>(v & 0xFF));
  out.push_back(static_cast<unsigned char>(v >> 8));
}

void put32(std::vector<unsigned char>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<unsigned char>((v >> (8 * i)) & 0xFF));
}

void put_tag(std::vector<unsigned char>& out, const char* tag) { out.insert(out.end(), tag, tag + 4); }

}  // namespace

MultichannelSignal read_wav(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, path + ": cannot open");
  const std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    bad(path, "not a RIFF/WAVE file");
  }

  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  bool have_fmt = false;
  const unsigned char* data = nullptr;
  std::size_t data_size = 0;
  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const unsigned char* chunk = bytes.data() + pos;
    const std::size_t size = le32(chunk + 4);
    const std::size_t body = pos + 8;
    const std::size_t available = std::min(size, bytes.size() - body);
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (available < 16) bad(path, "truncated fmt chunk");
      format = le16(chunk + 8);
      channels = le16(chunk + 10);
      rate = le32(chunk + 12);
      bits = le16(chunk + 22);
      if (format == kFormatExtensible) {
        if (available < 26) bad(path, "truncated extensible fmt chunk");
        format = le16(chunk + 32);
      }
      have_fmt = true;
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      data = chunk + 8;
      data_size = available;
    }
    pos = body + size + (size & 1);
  }
  if (!have_fmt) bad(path, "missing fmt chunk");
  if (!data) bad(path, "missing data chunk");
  const bool pcm_ok = format == kFormatPcm && (bits == 16 || bits == 24 || bits == 32);
  const bool float_ok = format == kFormatFloat && (bits == 32 || bits == 64);
  if (!pcm_ok && !float_ok) {
    bad(path, "unsupported encoding (format " + std::to_string(format) + ", " + std::to_string(bits) + " bits)");
  }
  if (channels == 0) bad(path, "zero channels");

  const std::size_t frame = static_cast<std::size_t>(channels) * (bits / 8);
  const std::size_t frames = data_size / frame;
  std::vector<double> samples(frames * channels);
  for (std::size_t t = 0; t < frames; ++t) {
    for (std::size_t c = 0; c < channels; ++c) {
      samples[c * frames + t] = decode(data + t * frame + c * (bits / 8), format, bits);
    }
  }
  return MultichannelSignal(channels, frames, std::move(samples), static_cast<double>(rate));
}

void write_wav(const std::string& path, const MultichannelSignal& signal, WavEncoding encoding) {
  std::uint16_t format = kFormatPcm, bits = 16;
  switch (encoding) {
    case WavEncoding::kPcm16: bits = 16; break;
    case WavEncoding::kPcm24: bits = 24; break;
    case WavEncoding::kPcm32: bits = 32; break;
    case WavEncoding::kFloat32: format = kFormatFloat; bits = 32; break;
    case WavEncoding::kFloat64: format = kFormatFloat; bits = 64; break;
  }
  const auto channels = static_cast<std::uint16_t>(signal.channels());
  const std::size_t frames = signal.length();
  const std::uint32_t block = channels * (bits / 8u);
  const auto data_size = static_cast<std::uint32_t>(frames * block);
  const auto rate = static_cast<std::uint32_t>(std::lround(signal.sample_rate()));

  std::vector<unsigned char> out;
  out.reserve(44 + data_size);
  put_tag(out, "RIFF");
  put32(out, 36 + data_size);
  put_tag(out, "WAVE");
  put_tag(out, "fmt ");
  put32(out, 16);
  put16(out, format);
  put16(out, channels);
  put32(out, rate);
  put32(out, rate * block);
  put16(out, static_cast<std::uint16_t>(block));
  put16(out, bits);
  put_tag(out, "data");
  put32(out, data_size);
  for (std::size_t t = 0; t < frames; ++t) {
    for (std::size_t c = 0; c < channels; ++c) {
      const double x = signal.channel(c)[t];
      if (format == kFormatFloat && bits == 64) {
        std::uint64_t u;
        std::memcpy(&u, &x, 8);
        put32(out, static_cast<std::uint32_t>(u));
        put32(out, static_cast<std::uint32_t>(u >> 32));
      } else if (format == kFormatFloat) {
        const float f = static_cast<float>(x);
        std::uint32_t u;
        std::memcpy(&u, &f, 4);
        put32(out, u);
      } else {
        const double scale = std::ldexp(1.0, bits - 1);
        const double q = std::clamp(std::round(x * scale), -scale, scale - 1.0);
        const auto v = static_cast<std::uint32_t>(static_cast<std::int32_t>(q));
        for (int i = 0; i < bits / 8; ++i) out.push_back(static_cast<unsigned char>((v >> (8 * i)) & 0xFF));
      }
    }
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw Error(ErrorCode::kIo, path + ": cannot open for writing");
  file.write(reinterpret_cast<const char*>(out.data()), static_cast<std::streamsize>(out.size()));
  if (!file) throw Error(ErrorCode::kIo, path + ": write failed");
}

}  // namespace fastsdr::cli
