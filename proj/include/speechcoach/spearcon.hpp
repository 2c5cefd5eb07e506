// speechcoach/spearcon.hpp
//
// Copyright (c)  2026  speechcoach authors
// Licensed under the Apache License, Version 2.0.
//
// Spearcon synthesis: pitch-preserving time compression of spoken phrases
// (synchronized overlap-add), peak normalization, and the on-disk asset
// cache (<dir>/<phrase_id>.wav + manifest.json).

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "speechcoach/audio.hpp"
#include "speechcoach/error.hpp"

namespace speechcoach {

// SOLA parameters for 16 kHz speech.
inline constexpr double kSolaFrameMs = 30.0;
inline constexpr double kSolaSearchMs = 7.5;

/// Time-scale modification by synchronized overlap-add: 30 ms Hann-windowed
/// analysis frames, synthesis hop = analysis hop x factor, per-frame
/// alignment search of +-7.5 ms by maximum normalized cross-correlation
/// (applied to the analysis position), and overlap-weight renormalization.
/// Output length is pinned to round(factor x input length) samples, so the
/// duration contract holds for any factor. Frames are verbatim input slices,
/// which preserves pitch.
inline AudioClip time_compress(const AudioClip& in, double factor) {
  if (!(factor > 0.0) || !(factor < 1.0))
    raise(Errc::InvalidFactor,
          "compression factor must be in (0,1), got " + std::to_string(factor));
  const int rate = in.sample_rate_hz;
  const std::size_t n = in.samples.size();
  const std::size_t frame =
      static_cast<std::size_t>(std::lround(kSolaFrameMs * rate / 1000.0));
  if (n < 2 * frame)
    raise(Errc::ClipTooShort,
          "input must be at least two analysis frames (" +
              std::to_string(2 * kSolaFrameMs) + " ms), got " +
              std::to_string(in.duration_ms()) + " ms");

  const std::size_t out_len = static_cast<std::size_t>(
      std::max<std::int64_t>(1, std::llround(factor * static_cast<double>(n))));
  const std::size_t nwin = std::min(frame, out_len);
  const std::size_t max_pos = out_len - nwin;

  std::vector<double> win(nwin, 1.0);
  if (nwin > 1)
    for (std::size_t i = 0; i < nwin; ++i)
      win[i] = 0.5 - 0.5 * std::cos(2.0 * M_PI * static_cast<double>(i) /
                                    static_cast<double>(nwin - 1));

  const std::size_t hop = std::max<std::size_t>(1, frame / 2);
  const std::size_t frames = (n - nwin) / hop + 1;  // >= 2 given n >= 2*frame
  const std::size_t search =
      static_cast<std::size_t>(std::lround(kSolaSearchMs * rate / 1000.0));

  std::vector<double> acc(out_len, 0.0);
  std::vector<double> wsum(out_len, 0.0);
  std::vector<double> est;  // output estimate over the current overlap
  std::size_t placed_end = 0;

  // Synthesis positions sit on a fixed grid (duration stays pinned and every
  // output sample gets frame coverage); the alignment search picks which
  // nearby input slice continues the output most coherently.
  for (std::size_t k = 0; k < frames; ++k) {
    const std::size_t a_nom = static_cast<std::size_t>(std::llround(
        static_cast<double>(k) * static_cast<double>(n - nwin) /
        static_cast<double>(frames - 1)));
    const std::size_t s = static_cast<std::size_t>(std::llround(
        static_cast<double>(k) * static_cast<double>(max_pos) /
        static_cast<double>(frames - 1)));
    std::size_t a = a_nom;

    const std::size_t ov_end = std::min(s + nwin, placed_end);
    if (k > 0 && search > 0 && ov_end > s) {
      const std::size_t len = ov_end - s;
      est.assign(len, 0.0);
      double e_out = 0.0;
      for (std::size_t t = 0; t < len; ++t) {
        if (wsum[s + t] > 1e-12) est[t] = acc[s + t] / wsum[s + t];
        e_out += est[t] * est[t];
      }
      const std::size_t lo = a_nom > search ? a_nom - search : 0;
      const std::size_t hi = std::min(n - nwin, a_nom + search);
      double best = -1e300;
      for (std::size_t p = lo; p <= hi; ++p) {
        double num = 0.0, e_in = 0.0;
        for (std::size_t t = 0; t < len; ++t) {
          const double x = static_cast<double>(in.samples[p + t]);
          num += x * est[t];
          e_in += x * x;
        }
        const double den = std::sqrt(e_in * e_out);
        const double score = den > 1e-12 ? num / den : 0.0;
        if (score > best) {
          best = score;
          a = p;
        }
      }
    }

    for (std::size_t t = 0; t < nwin; ++t) {
      acc[s + t] += win[t] * static_cast<double>(in.samples[a + t]);
      wsum[s + t] += win[t];
    }
    placed_end = std::max(placed_end, s + nwin);
  }

  AudioClip out;
  out.sample_rate_hz = rate;
  out.samples.resize(out_len);
  for (std::size_t i = 0; i < out_len; ++i)
    out.samples[i] =
        wsum[i] > 1e-9 ? static_cast<float>(acc[i] / wsum[i]) : 0.0f;
  return out;
}

/// Scales so the peak hits 10^(target_dbfs/20). Idempotent.
inline AudioClip peak_normalize(const AudioClip& in, double target_dbfs = -3.0) {
  double peak = 0.0;
  for (float s : in.samples) peak = std::max(peak, std::fabs(static_cast<double>(s)));
  if (peak <= 0.0) raise(Errc::SilentClip, "cannot normalize an all-zero clip");
  const double gain = std::pow(10.0, target_dbfs / 20.0) / peak;
  AudioClip out;
  out.sample_rate_hz = in.sample_rate_hz;
  out.samples.resize(in.samples.size());
  for (std::size_t i = 0; i < in.samples.size(); ++i)
    out.samples[i] = static_cast<float>(static_cast<double>(in.samples[i]) * gain);
  return out;
}

namespace detail {

inline void fft_radix2(std::vector<std::complex<double>>& a) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = -2.0 * M_PI / static_cast<double>(len);
    const std::complex<double> wl(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        const std::complex<double> u = a[i + k];
        const std::complex<double> v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wl;
      }
    }
  }
}

}  // namespace detail

/// Frequency of the maximum-magnitude bin of a Hann-windowed transform of the
/// whole clip, refined by parabolic interpolation between bins. Result is
/// undefined for all-zero input (returns 0); check SilentClip cases first.
inline double dominant_frequency(const AudioClip& clip) {
  if (clip.duration_ms() < 100.0)
    raise(Errc::ClipTooShort, "dominant_frequency needs at least 100 ms, got " +
                                  std::to_string(clip.duration_ms()) + " ms");
  const std::size_t n = clip.samples.size();
  std::size_t nfft = 1;
  while (nfft < n) nfft <<= 1;
  std::vector<std::complex<double>> x(nfft, {0.0, 0.0});
  for (std::size_t i = 0; i < n; ++i) {
    const double w = n > 1 ? 0.5 - 0.5 * std::cos(2.0 * M_PI * static_cast<double>(i) /
                                                  static_cast<double>(n - 1))
                           : 1.0;
    x[i] = {w * static_cast<double>(clip.samples[i]), 0.0};
  }
  detail::fft_radix2(x);

  std::size_t best = 1;
  double best_mag = -1.0;
  for (std::size_t k = 1; k < nfft / 2; ++k) {
    const double m = std::abs(x[k]);
    if (m > best_mag) {
      best_mag = m;
      best = k;
    }
  }
  if (best_mag <= 0.0) return 0.0;

  double delta = 0.0;
  const double ma = std::abs(x[best - 1]);
  const double mc = std::abs(x[best + 1]);
  if (ma > 0.0 && mc > 0.0 && best_mag > 0.0) {
    const double la = std::log(ma);
    const double lb = std::log(best_mag);
    const double lc = std::log(mc);
    const double denom = la - 2.0 * lb + lc;
    if (std::fabs(denom) > 1e-12) {
      delta = 0.5 * (la - lc) / denom;
      delta = std::max(-0.5, std::min(0.5, delta));
    }
  }
  return (static_cast<double>(best) + delta) * clip.sample_rate_hz /
         static_cast<double>(nfft);
}

/// A built auditory cue bound to one target phrase.
struct SpearconAsset {
  std::string phrase_id;
  AudioClip clip;
  double compression_factor = 0.0;

  double duration_ms() const { return clip.duration_ms(); }
};

/// Compresses `source` by `factor`; if the result still exceeds the duration
/// cap, recompresses the original so the cue lands exactly on the cap (the
/// phrase stays identifiable, unlike truncation). Then peak-normalizes.
inline SpearconAsset build_spearcon(const std::string& phrase_id,
                                    const AudioClip& source, double factor = 0.4,
                                    double max_duration_ms = 1000.0,
                                    double target_dbfs = -3.0) {
  AudioClip compressed = time_compress(source, factor);
  double used = factor;
  if (compressed.duration_ms() > max_duration_ms) {
    used = max_duration_ms / source.duration_ms();
    compressed = time_compress(source, used);
  }
  SpearconAsset asset;
  asset.phrase_id = phrase_id;
  asset.clip = peak_normalize(compressed, target_dbfs);
  asset.compression_factor = used;
  return asset;
}

/// Directory-backed asset store: one WAV per phrase plus a manifest mapping
/// phrase_id -> {source file, factor, duration_ms}.
class AssetCache {
 public:
  struct Entry {
    std::string source;
    double factor = 0.0;
    double duration_ms = 0.0;
  };

  explicit AssetCache(std::filesystem::path dir) : dir_(std::move(dir)) {
    load_manifest();
  }

  const std::filesystem::path& dir() const { return dir_; }

  std::filesystem::path wav_path(const std::string& phrase_id) const {
    return dir_ / (phrase_id + ".wav");
  }

  bool contains(const std::string& phrase_id) const {
    return std::filesystem::exists(wav_path(phrase_id));
  }

  void store(const SpearconAsset& asset, const std::string& source_file) {
    std::filesystem::create_directories(dir_);
    write_wav(wav_path(asset.phrase_id), asset.clip);
    entries_[asset.phrase_id] =
        Entry{source_file, asset.compression_factor, asset.duration_ms()};
    save_manifest();
  }

  SpearconAsset load(const std::string& phrase_id) const {
    if (!contains(phrase_id))
      raise(Errc::MissingAsset, "no spearcon asset for phrase \"" + phrase_id +
                                    "\" in " + dir_.string());
    SpearconAsset asset;
    asset.phrase_id = phrase_id;
    asset.clip = read_wav(wav_path(phrase_id));
    auto it = entries_.find(phrase_id);
    if (it != entries_.end()) asset.compression_factor = it->second.factor;
    return asset;
  }

  const std::map<std::string, Entry>& entries() const { return entries_; }

 private:
  void load_manifest() {
    const auto path = dir_ / "manifest.json";
    if (!std::filesystem::exists(path)) return;
    std::ifstream in(path);
    const nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded() || !j.is_object())
      raise(Errc::Io, "unparsable manifest: " + path.string());
    for (const auto& [id, e] : j.items()) {
      entries_[id] = Entry{e.value("source", std::string{}), e.value("factor", 0.0),
                           e.value("duration_ms", 0.0)};
    }
  }

  void save_manifest() const {
    nlohmann::ordered_json j = nlohmann::ordered_json::object();
    for (const auto& [id, e] : entries_) {
      j[id] = {{"source", e.source},
               {"factor", e.factor},
               {"duration_ms", e.duration_ms}};
    }
    std::ofstream out(dir_ / "manifest.json", std::ios::trunc);
    if (!out) raise(Errc::Io, "cannot write manifest in " + dir_.string());
    out << j.dump(2) << "\n";
  }

  std::filesystem::path dir_;
  std::map<std::string, Entry> entries_;
};

}  // namespace speechcoach
