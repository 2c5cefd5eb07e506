// speechcoach/tests/oracles.hpp
//
// Copyright (c)  2026  speechcoach authors
// Licensed under the Apache License, Version 2.0.
//
// Independent naive reference implementations used as test oracles.
// Everything here is deliberately written by the most direct route available
// (definitional scans, power series, brute-force enumeration) and stays
// independent of the library code paths it checks.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include <stdlib.h>
#include <unistd.h>

namespace oracles {

// ---------------------------------------------------------------------------
// Deterministic random helpers (mt19937_64 is fully pinned by the standard).

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t raw() { return eng_(); }

  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<std::int64_t>(eng_() % span);
  }

  double uniform_real(double lo, double hi) {
    const double u = static_cast<double>(eng_() >> 11) * 0x1.0p-53;
    return lo + u * (hi - lo);
  }

  // Box-Muller; avoids the implementation-defined std::normal_distribution.
  double normal(double mean, double stddev) {
    if (have_spare_) {
      have_spare_ = false;
      return mean + stddev * spare_;
    }
    double u1 = 0.0;
    while (u1 <= 0.0) u1 = uniform_real(0.0, 1.0);
    const double u2 = uniform_real(0.0, 1.0);
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * M_PI * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return mean + stddev * r * std::cos(theta);
  }

  template <typename T>
  const T& pick(const std::vector<T>& v) {
    return v[static_cast<std::size_t>(uniform_int(0, static_cast<std::int64_t>(v.size()) - 1))];
  }

 private:
  std::mt19937_64 eng_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// ---------------------------------------------------------------------------
// Batch reference matcher: definitional greedy leftmost-longest scan over a
// full token list, matching phrases by direct token comparison.

struct RefMatch {
  std::size_t phrase;  // index into the phrase list
  std::size_t first;   // token index of first matched token
  std::size_t last;    // token index of last matched token
};

inline std::vector<RefMatch> reference_matches(
    const std::vector<std::string>& tokens,
    const std::vector<std::vector<std::string>>& phrases) {
  std::vector<RefMatch> out;
  std::size_t i = 0;
  while (i < tokens.size()) {
    std::size_t best_len = 0;
    std::size_t best_phrase = 0;
    for (std::size_t p = 0; p < phrases.size(); ++p) {
      const auto& ph = phrases[p];
      if (ph.size() <= best_len || i + ph.size() > tokens.size()) continue;
      bool match = true;
      for (std::size_t k = 0; k < ph.size(); ++k) {
        if (tokens[i + k] != ph[k]) {
          match = false;
          break;
        }
      }
      if (match) {
        best_len = ph.size();
        best_phrase = p;
      }
    }
    if (best_len > 0) {
      out.push_back(RefMatch{best_phrase, i, i + best_len - 1});
      i += best_len;
    } else {
      ++i;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Millisecond-timeline speaking-time oracle (small spans only).

inline std::int64_t timeline_speaking_time(
    const std::vector<std::pair<std::int64_t, std::int64_t>>& intervals,
    std::int64_t threshold_ms) {
  if (intervals.empty()) return 0;
  // Merge: walk sorted intervals, counting gaps <= threshold as speaking.
  // Implemented via an explicit covered set over the session span.
  std::int64_t lo = intervals.front().first;
  std::int64_t hi = lo;
  for (const auto& iv : intervals) hi = std::max(hi, iv.second);
  const std::size_t span = static_cast<std::size_t>(hi - lo);
  std::vector<char> covered(span + 1, 0);
  for (const auto& iv : intervals)
    for (std::int64_t t = iv.first; t < iv.second; ++t)
      covered[static_cast<std::size_t>(t - lo)] = 1;
  // Close gaps <= threshold between covered runs.
  std::int64_t total = 0;
  std::int64_t gap = -1;  // -1: before first covered ms
  for (std::size_t t = 0; t <= span; ++t) {
    if (covered[t]) {
      if (gap > 0 && gap <= threshold_ms) total += gap;
      gap = 0;
      total += 1;
    } else if (gap >= 0) {
      gap += 1;
    }
  }
  return total;
}

// ---------------------------------------------------------------------------
// Naive statistics.

inline double naive_mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

inline double naive_sample_var(const std::vector<double>& v) {
  const double m = naive_mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size() - 1);
}

// OLS slope/intercept by the closed-form sum formulas.
inline std::pair<double, double> naive_ols(const std::vector<double>& xs,
                                           const std::vector<double>& ys) {
  const double n = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxy += xs[i] * ys[i];
    sxx += xs[i] * xs[i];
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double intercept = (sy - slope * sx) / n;
  return {slope, intercept};
}

// Regularized incomplete beta via the hypergeometric power series
// (a different algebraic route than the continued fraction in the library).
inline double series_betainc(double x, double a, double b) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  if (x > (a + 1.0) / (a + b + 2.0)) return 1.0 - series_betainc(1.0 - x, b, a);
  const double lbeta = std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
  const double front = std::exp(a * std::log(x) + b * std::log1p(-x) - lbeta) / a;
  double term = 1.0;
  double sum = 1.0;
  for (int n = 0; n < 10000; ++n) {
    term *= x * (a + b + n) / (a + 1.0 + n);
    sum += term;
    if (std::fabs(term) < std::fabs(sum) * 1e-17) break;
  }
  return front * sum;
}

inline double naive_student_two_sided_p(double t, double df) {
  const double x = df / (df + t * t);
  return series_betainc(x, df / 2.0, 0.5);
}

// 97.5% Student quantile by bisection on the series CDF.
inline double naive_t_critical_975(double df) {
  double lo = 0.0, hi = 1.0;
  while (naive_student_two_sided_p(hi, df) > 0.05) hi *= 2.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (naive_student_two_sided_p(mid, df) > 0.05)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

struct NaiveT {
  double t, df, p, mean, ci_lo, ci_hi;
};

inline NaiveT naive_one_sample_t(const std::vector<double>& v, double mu0) {
  const double n = static_cast<double>(v.size());
  const double m = naive_mean(v);
  const double se = std::sqrt(naive_sample_var(v) / n);
  const double t = (m - mu0) / se;
  const double df = n - 1.0;
  const double crit = naive_t_critical_975(df);
  return {t, df, naive_student_two_sided_p(t, df), m, m - crit * se, m + crit * se};
}

inline NaiveT naive_two_sample_t(const std::vector<double>& a,
                                 const std::vector<double>& b) {
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const double ma = naive_mean(a);
  const double mb = naive_mean(b);
  const double sp2 = ((na - 1.0) * naive_sample_var(a) + (nb - 1.0) * naive_sample_var(b)) /
                     (na + nb - 2.0);
  const double se = std::sqrt(sp2 * (1.0 / na + 1.0 / nb));
  const double t = (ma - mb) / se;
  const double df = na + nb - 2.0;
  const double crit = naive_t_critical_975(df);
  const double d = ma - mb;
  return {t, df, naive_student_two_sided_p(t, df), d, d - crit * se, d + crit * se};
}

// U statistic by enumerating all pairwise comparisons.
inline double pairwise_u(const std::vector<double>& a, const std::vector<double>& b) {
  double u = 0.0;
  for (double x : a)
    for (double y : b) {
      if (x > y)
        u += 1.0;
      else if (x == y)
        u += 0.5;
    }
  return u;
}

// Tie-corrected normal-approximation p, written out directly.
inline double naive_mw_p(const std::vector<double>& a, const std::vector<double>& b) {
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const double n = na + nb;
  std::vector<double> all(a);
  all.insert(all.end(), b.begin(), b.end());
  std::sort(all.begin(), all.end());
  double tie_sum = 0.0;
  for (std::size_t i = 0; i < all.size();) {
    std::size_t j = i;
    while (j < all.size() && all[j] == all[i]) ++j;
    const double t = static_cast<double>(j - i);
    tie_sum += t * t * t - t;
    i = j;
  }
  const double mu = na * nb / 2.0;
  const double var = na * nb / 12.0 * ((n + 1.0) - tie_sum / (n * (n - 1.0)));
  if (var <= 0.0) return 1.0;
  const double u = pairwise_u(a, b);
  double z = u - mu;
  if (z > 0.5)
    z -= 0.5;
  else if (z < -0.5)
    z += 0.5;
  else
    z = 0.0;
  z /= std::sqrt(var);
  const double p = std::erfc(std::fabs(z) / std::sqrt(2.0));
  return std::min(1.0, p);
}

// Exact permutation two-sided p for the U statistic (pooled values, all
// C(n, na) group splits). Feasible for n <= 16.
inline double exact_mw_p(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> all(a);
  all.insert(all.end(), b.begin(), b.end());
  const std::size_t n = all.size();
  const std::size_t na = a.size();
  const double mu = static_cast<double>(na * b.size()) / 2.0;
  const double observed = std::fabs(pairwise_u(a, b) - mu);
  std::size_t hits = 0;
  std::size_t total = 0;
  std::vector<std::size_t> idx(na);
  std::iota(idx.begin(), idx.end(), 0);
  for (;;) {
    std::vector<double> ga, gb;
    std::vector<char> in_a(n, 0);
    for (std::size_t i : idx) in_a[i] = 1;
    for (std::size_t i = 0; i < n; ++i) (in_a[i] ? ga : gb).push_back(all[i]);
    if (std::fabs(pairwise_u(ga, gb) - mu) >= observed - 1e-12) ++hits;
    ++total;
    // next combination
    std::size_t k = na;
    while (k > 0 && idx[k - 1] == n - na + k - 1) --k;
    if (k == 0) break;
    ++idx[k - 1];
    for (std::size_t j = k; j < na; ++j) idx[j] = idx[j - 1] + 1;
  }
  return static_cast<double>(hits) / static_cast<double>(total);
}

inline double naive_kappa(const std::vector<std::string>& a,
                          const std::vector<std::string>& b) {
  const double n = static_cast<double>(a.size());
  std::map<std::string, double> ca, cb;
  double agree = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ca[a[i]] += 1.0;
    cb[b[i]] += 1.0;
    if (a[i] == b[i]) agree += 1.0;
  }
  const double po = agree / n;
  double pe = 0.0;
  for (const auto& [label, count] : ca) {
    auto it = cb.find(label);
    if (it != cb.end()) pe += (count / n) * (it->second / n);
  }
  return (po - pe) / (1.0 - pe);
}

// ---------------------------------------------------------------------------
// Goertzel single-frequency power, swept over a grid; picks the dominant
// frequency without any FFT.

inline double goertzel_power(const std::vector<float>& samples, int rate, double freq) {
  const double w = 2.0 * M_PI * freq / static_cast<double>(rate);
  const double coeff = 2.0 * std::cos(w);
  double s0 = 0.0, s1 = 0.0, s2 = 0.0;
  for (float x : samples) {
    s0 = static_cast<double>(x) + coeff * s1 - s2;
    s2 = s1;
    s1 = s0;
  }
  return s1 * s1 + s2 * s2 - coeff * s1 * s2;
}

inline double goertzel_dominant(const std::vector<float>& samples, int rate,
                                double f_lo, double f_hi, double step) {
  double best_f = f_lo;
  double best_p = -1.0;
  for (double f = f_lo; f <= f_hi; f += step) {
    const double p = goertzel_power(samples, rate, f);
    if (p > best_p) {
      best_p = p;
      best_f = f;
    }
  }
  return best_f;
}

// ---------------------------------------------------------------------------
// Scratch directories for file-based tests.

class TempDir {
 public:
  TempDir() {
    std::string tmpl = (std::filesystem::temp_directory_path() / "speechcoach_XXXXXX").string();
    std::vector<char> buf(tmpl.begin(), tmpl.end());
    buf.push_back('\0');
    if (mkdtemp(buf.data()) == nullptr) throw std::runtime_error("mkdtemp failed");
    path_ = buf.data();
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace oracles
