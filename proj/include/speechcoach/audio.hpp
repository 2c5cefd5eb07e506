// speechcoach/audio.hpp
//
// Copyright (c)  2026  speechcoach authors
// Licensed under the Apache License, Version 2.0.
//
// Mono audio clips and RIFF WAV I/O (PCM 16-bit signed little-endian).

#pragma once

#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "speechcoach/error.hpp"

namespace speechcoach {

inline constexpr int kDefaultSampleRate = 16000;

/// Mono clip, amplitudes in [-1, 1].
struct AudioClip {
  std::vector<float> samples;
  int sample_rate_hz = kDefaultSampleRate;

  double duration_ms() const {
    return static_cast<double>(samples.size()) * 1000.0 /
           static_cast<double>(sample_rate_hz);
  }
};

/// Linear-interpolation resampling.
inline AudioClip resample_linear(const AudioClip& in, int target_rate) {
  if (target_rate == in.sample_rate_hz) return in;
  AudioClip out;
  out.sample_rate_hz = target_rate;
  if (in.samples.empty()) return out;
  const std::size_t n_out = static_cast<std::size_t>(std::llround(
      static_cast<double>(in.samples.size()) * target_rate / in.sample_rate_hz));
  out.samples.resize(std::max<std::size_t>(n_out, 1));
  const double step =
      static_cast<double>(in.sample_rate_hz) / static_cast<double>(target_rate);
  for (std::size_t i = 0; i < out.samples.size(); ++i) {
    const double pos = static_cast<double>(i) * step;
    const std::size_t i0 = std::min(static_cast<std::size_t>(pos), in.samples.size() - 1);
    const std::size_t i1 = std::min(i0 + 1, in.samples.size() - 1);
    const double frac = pos - static_cast<double>(i0);
    out.samples[i] = static_cast<float>((1.0 - frac) * in.samples[i0] +
                                        frac * in.samples[i1]);
  }
  return out;
}

namespace detail {

inline std::uint32_t read_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

inline std::uint16_t read_u16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

inline void put_u32(std::string& s, std::uint32_t v) {
  s.push_back(static_cast<char>(v & 0xFF));
  s.push_back(static_cast<char>((v >> 8) & 0xFF));
  s.push_back(static_cast<char>((v >> 16) & 0xFF));
  s.push_back(static_cast<char>((v >> 24) & 0xFF));
}

inline void put_u16(std::string& s, std::uint16_t v) {
  s.push_back(static_cast<char>(v & 0xFF));
  s.push_back(static_cast<char>((v >> 8) & 0xFF));
}

}  // namespace detail

/// Reads a PCM16 mono WAV at its native rate. Chunk order is not assumed.
inline AudioClip read_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(Errc::Io, "cannot open " + path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  const std::string name = path.string();
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0)
    raise(Errc::BadWav, name + ": not a RIFF/WAVE file");

  bool have_fmt = false;
  int channels = 0, rate = 0, bits = 0, format = 0;
  std::size_t data_off = 0, data_len = 0;
  std::size_t off = 12;
  while (off + 8 <= bytes.size()) {
    const std::size_t chunk_len = detail::read_u32(bytes.data() + off + 4);
    const unsigned char* tag = bytes.data() + off;
    const std::size_t body = off + 8;
    if (body + chunk_len > bytes.size())
      raise(Errc::BadWav, name + ": truncated chunk");
    if (std::memcmp(tag, "fmt ", 4) == 0) {
      if (chunk_len < 16) raise(Errc::BadWav, name + ": short fmt chunk");
      format = detail::read_u16(bytes.data() + body);
      channels = detail::read_u16(bytes.data() + body + 2);
      rate = static_cast<int>(detail::read_u32(bytes.data() + body + 4));
      bits = detail::read_u16(bytes.data() + body + 14);
      have_fmt = true;
    } else if (std::memcmp(tag, "data", 4) == 0) {
      data_off = body;
      data_len = chunk_len;
    }
    off = body + chunk_len + (chunk_len & 1);  // chunks are word-aligned
  }
  if (!have_fmt || data_off == 0)
    raise(Errc::BadWav, name + ": missing fmt or data chunk");
  if (format != 1 || bits != 16)
    raise(Errc::BadWav, name + ": only PCM 16-bit supported");
  if (channels != 1)
    raise(Errc::BadWav, name + ": only mono supported (got " +
                            std::to_string(channels) + " channels)");
  if (rate <= 0) raise(Errc::BadWav, name + ": bad sample rate");

  AudioClip clip;
  clip.sample_rate_hz = rate;
  const std::size_t n = data_len / 2;
  clip.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const unsigned char* p = bytes.data() + data_off + 2 * i;
    const std::int16_t v = static_cast<std::int16_t>(p[0] | (p[1] << 8));
    clip.samples[i] = static_cast<float>(v) / 32768.0f;
  }
  return clip;
}

/// Loads a WAV and resamples to 16 kHz if needed.
inline AudioClip load_wav_16k(const std::filesystem::path& path) {
  AudioClip clip = read_wav(path);
  if (clip.sample_rate_hz != kDefaultSampleRate)
    clip = resample_linear(clip, kDefaultSampleRate);
  return clip;
}

/// Writes a PCM16 mono WAV at the clip's rate.
inline void write_wav(const std::filesystem::path& path, const AudioClip& clip) {
  std::string out;
  out.reserve(44 + clip.samples.size() * 2);
  const std::uint32_t data_len = static_cast<std::uint32_t>(clip.samples.size() * 2);
  out.append("RIFF");
  detail::put_u32(out, 36 + data_len);
  out.append("WAVE");
  out.append("fmt ");
  detail::put_u32(out, 16);
  detail::put_u16(out, 1);  // PCM
  detail::put_u16(out, 1);  // mono
  detail::put_u32(out, static_cast<std::uint32_t>(clip.sample_rate_hz));
  detail::put_u32(out, static_cast<std::uint32_t>(clip.sample_rate_hz) * 2);
  detail::put_u16(out, 2);   // block align
  detail::put_u16(out, 16);  // bits
  out.append("data");
  detail::put_u32(out, data_len);
  for (float s : clip.samples) {
    const long q = std::lround(static_cast<double>(s) * 32768.0);
    const std::int16_t v = static_cast<std::int16_t>(std::max(-32768L, std::min(32767L, q)));
    detail::put_u16(out, static_cast<std::uint16_t>(v));
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) raise(Errc::Io, "cannot write " + path.string());
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) raise(Errc::Io, "short write to " + path.string());
}

}  // namespace speechcoach
