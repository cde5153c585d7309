// src/wav.cpp

// Copyright 2026 The scatloc authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "scatloc/wav.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <stdexcept>

static_assert(std::endian::native == std::endian::little,
              "WAV and container I/O assume a little-endian host");

namespace scatloc {
namespace {

struct ChunkHeader {
  char id[4];
  std::uint32_t size;
};

std::uint16_t read_u16(const char* p) {
  std::uint16_t v;
  std::memcpy(&v, p, 2);
  return v;
}

std::uint32_t read_u32(const char* p) {
  std::uint32_t v;
  std::memcpy(&v, p, 4);
  return v;
}

}  // namespace

TimeSignal read_wav(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("read_wav: cannot open " + path);

  char riff[12];
  f.read(riff, 12);
  if (!f || std::memcmp(riff, "RIFF", 4) != 0 || std::memcmp(riff + 8, "WAVE", 4) != 0)
    throw std::runtime_error("read_wav: not a RIFF/WAVE file: " + path);

  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  std::vector<char> data;
  bool have_fmt = false, have_data = false;

  ChunkHeader ch;
  while (f.read(reinterpret_cast<char*>(&ch.id), 4) &&
         f.read(reinterpret_cast<char*>(&ch.size), 4)) {
    std::vector<char> body(ch.size);
    f.read(body.data(), ch.size);
    if (!f) throw std::runtime_error("read_wav: truncated chunk in " + path);
    if (std::memcmp(ch.id, "fmt ", 4) == 0) {
      if (ch.size < 16) throw std::runtime_error("read_wav: malformed fmt chunk");
      format = read_u16(body.data());
      channels = read_u16(body.data() + 2);
      rate = read_u32(body.data() + 4);
      bits = read_u16(body.data() + 14);
      have_fmt = true;
    } else if (std::memcmp(ch.id, "data", 4) == 0) {
      data = std::move(body);
      have_data = true;
    }
    if (ch.size % 2 == 1) f.seekg(1, std::ios::cur);  // chunk padding
  }
  if (!have_fmt || !have_data) throw std::runtime_error("read_wav: missing fmt/data chunk");
  if (channels == 0) throw std::runtime_error("read_wav: zero channels");

  TimeSignal sig;
  sig.sample_rate = static_cast<int>(rate);
  if (format == 1 && bits == 16) {
    const std::size_t frames = data.size() / (2 * channels);
    sig.samples.resize(frames);
    for (std::size_t i = 0; i < frames; ++i) {
      std::int16_t v;
      std::memcpy(&v, data.data() + i * 2 * channels, 2);
      sig.samples[i] = static_cast<double>(v) / 32768.0;
    }
  } else if (format == 3 && bits == 32) {
    const std::size_t frames = data.size() / (4 * channels);
    sig.samples.resize(frames);
    for (std::size_t i = 0; i < frames; ++i) {
      float v;
      std::memcpy(&v, data.data() + i * 4 * channels, 4);
      sig.samples[i] = static_cast<double>(v);
    }
  } else {
    throw std::runtime_error("read_wav: unsupported format (want PCM16 or float32)");
  }
  return sig;
}

void write_wav(const std::string& path, const TimeSignal& sig) {
  if (sig.sample_rate <= 0) throw std::invalid_argument("write_wav: bad sample rate");
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("write_wav: cannot open " + path);

  const std::uint32_t data_bytes = static_cast<std::uint32_t>(sig.samples.size() * 4);
  const std::uint32_t riff_size = 36 + data_bytes;
  const std::uint16_t format = 3, channels = 1, bits = 32;
  const std::uint32_t rate = static_cast<std::uint32_t>(sig.sample_rate);
  const std::uint32_t byte_rate = rate * channels * bits / 8;
  const std::uint16_t block_align = channels * bits / 8;
  const std::uint32_t fmt_size = 16;

  f.write("RIFF", 4);
  f.write(reinterpret_cast<const char*>(&riff_size), 4);
  f.write("WAVE", 4);
  f.write("fmt ", 4);
  f.write(reinterpret_cast<const char*>(&fmt_size), 4);
  f.write(reinterpret_cast<const char*>(&format), 2);
  f.write(reinterpret_cast<const char*>(&channels), 2);
  f.write(reinterpret_cast<const char*>(&rate), 4);
  f.write(reinterpret_cast<const char*>(&byte_rate), 4);
  f.write(reinterpret_cast<const char*>(&block_align), 2);
  f.write(reinterpret_cast<const char*>(&bits), 2);
  f.write("data", 4);
  f.write(reinterpret_cast<const char*>(&data_bytes), 4);
  for (double s : sig.samples) {
    float v = static_cast<float>(s);
    f.write(reinterpret_cast<const char*>(&v), 4);
  }
  if (!f) throw std::runtime_error("write_wav: write failed for " + path);
}

}  // namespace scatloc
