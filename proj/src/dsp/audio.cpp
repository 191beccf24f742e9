// Copyright 2026 The Bitwave Authors
// SPDX-License-Identifier: Apache-2.0

#include "bitwave/dsp/audio.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "bitwave/core/error.hpp"
#include "core/byteio.hpp"

namespace bitwave::dsp {

namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::string describe(const std::filesystem::path& path) { return "WAV file " + path.string() + ": "; }

}  // namespace

AudioClip read_wav(const std::filesystem::path& path, int expected_rate) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(describe(path) + "cannot open");
  char tag[4];
  auto read_tag = [&](const char* want) {
    if (!in.read(tag, 4) || std::memcmp(tag, want, 4) != 0)
      throw DataError(describe(path) + "not a RIFF/WAVE file");
  };
  try {
    read_tag("RIFF");
    io::get_le<std::uint32_t>(in);
    read_tag("WAVE");

    bool have_format = false;
    std::uint16_t channels = 0, bits = 0;
    std::uint32_t rate = 0;
    while (in.read(tag, 4)) {
      const auto size = io::get_le<std::uint32_t>(in);
      if (std::memcmp(tag, "fmt ", 4) == 0) {
        if (size < 16) throw DataError(describe(path) + "truncated format chunk");
        auto format = io::get_le<std::uint16_t>(in);
        channels = io::get_le<std::uint16_t>(in);
        rate = io::get_le<std::uint32_t>(in);
        io::get_le<std::uint32_t>(in);
        io::get_le<std::uint16_t>(in);
        bits = io::get_le<std::uint16_t>(in);
        std::uint32_t consumed = 16;
        if (format == kFormatExtensible && size >= 40) {
          io::get_le<std::uint16_t>(in);
          io::get_le<std::uint16_t>(in);
          io::get_le<std::uint32_t>(in);
          format = io::get_le<std::uint16_t>(in);
          consumed = 26;
        }
        in.ignore(static_cast<std::streamsize>(size - consumed + (size & 1)));
        if (format != kFormatPcm)
          throw DataError(describe(path) + "non-PCM format tag " + std::to_string(format) + "; 16-bit PCM required");
        if (channels != 1) throw DataError(describe(path) + "mono required, found " + std::to_string(channels) + " channels");
        if (bits != 16) throw DataError(describe(path) + "16-bit PCM required, found " + std::to_string(bits) + " bits");
        if (expected_rate > 0 && rate != static_cast<std::uint32_t>(expected_rate))
          throw DataError(describe(path) + "sample-rate mismatch: file has " + std::to_string(rate) + " Hz, expected " +
                          std::to_string(expected_rate) + " Hz");
        have_format = true;
      } else if (std::memcmp(tag, "data", 4) == 0) {
        if (!have_format) throw DataError(describe(path) + "data chunk before format chunk");
        const std::size_t count = size / 2;
        std::vector<char> raw(count * 2);
        if (!in.read(raw.data(), static_cast<std::streamsize>(raw.size())))
          throw DataError(describe(path) + "truncated data chunk");
        AudioClip clip;
        clip.sample_rate = static_cast<int>(rate);
        clip.samples.resize(static_cast<Index>(count));
        for (std::size_t i = 0; i < count; ++i) {
          const auto lo = static_cast<std::uint8_t>(raw[2 * i]);
          const auto hi = static_cast<std::uint8_t>(raw[2 * i + 1]);
          const auto v = static_cast<std::int16_t>(static_cast<std::uint16_t>(lo | (hi << 8)));
          clip.samples[static_cast<Index>(i)] = v / 32768.0;
        }
        return clip;
      } else {
        in.ignore(static_cast<std::streamsize>(size + (size & 1)));
      }
    }
  } catch (const DataError& e) {
    if (std::string(e.what()).starts_with("WAV file")) throw;
    throw DataError(describe(path) + e.what());
  }
  throw DataError(describe(path) + "no data chunk");
}

void write_wav(const std::filesystem::path& path, const AudioClip& clip) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError(describe(path) + "cannot create");
  const auto data_bytes = static_cast<std::uint32_t>(clip.size() * 2);
  out.write("RIFF", 4);
  io::put_le<std::uint32_t>(out, 36 + data_bytes);
  out.write("WAVEfmt ", 8);
  io::put_le<std::uint32_t>(out, 16);
  io::put_le<std::uint16_t>(out, kFormatPcm);
  io::put_le<std::uint16_t>(out, 1);
  io::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(clip.sample_rate));
  io::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(clip.sample_rate * 2));
  io::put_le<std::uint16_t>(out, 2);
  io::put_le<std::uint16_t>(out, 16);
  out.write("data", 4);
  io::put_le<std::uint32_t>(out, data_bytes);
  std::vector<char> raw(data_bytes);
  for (Index i = 0; i < clip.size(); ++i) {
    const double scaled = std::round(clip.samples[i] * 32768.0);
    const auto v = static_cast<std::int16_t>(std::clamp(scaled, -32768.0, 32767.0));
    const auto u = static_cast<std::uint16_t>(v);
    raw[2 * static_cast<std::size_t>(i)] = static_cast<char>(u & 0xFF);
    raw[2 * static_cast<std::size_t>(i) + 1] = static_cast<char>(u >> 8);
  }
  out.write(raw.data(), static_cast<std::streamsize>(raw.size()));
  if (!out) throw DataError(describe(path) + "write failed");
}

}  // namespace bitwave::dsp
