// speechcoach/transcript.hpp
//
// Copyright (c)  2026  speechcoach authors
// Licensed under the Apache License, Version 2.0.
//
// Word-event normalization, deduplicating ingestion, and streaming
// whole-token phrase matching with greedy leftmost-longest resolution.

#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "speechcoach/error.hpp"

namespace speechcoach {

/// One finalized recognized word. Timestamps are session-clock milliseconds.
struct WordEvent {
  std::string text;
  std::int64_t start_ms = 0;
  std::int64_t end_ms = 0;
  double confidence = 1.0;
};

namespace detail {

// Minimal UTF-8 decode; malformed sequences yield U+FFFD and resync.
inline char32_t decode_utf8(std::string_view s, std::size_t& i) {
  const unsigned char c = static_cast<unsigned char>(s[i]);
  if (c < 0x80) {
    ++i;
    return c;
  }
  int extra = 0;
  char32_t cp = 0;
  if ((c >> 5) == 0x06) {
    cp = c & 0x1F;
    extra = 1;
  } else if ((c >> 4) == 0x0E) {
    cp = c & 0x0F;
    extra = 2;
  } else if ((c >> 3) == 0x1E) {
    cp = c & 0x07;
    extra = 3;
  } else {
    ++i;
    return 0xFFFD;
  }
  if (i + static_cast<std::size_t>(extra) >= s.size()) {
    ++i;
    return 0xFFFD;
  }
  for (int k = 1; k <= extra; ++k) {
    const unsigned char cc = static_cast<unsigned char>(s[i + static_cast<std::size_t>(k)]);
    if ((cc >> 6) != 0x02) {
      ++i;
      return 0xFFFD;
    }
    cp = (cp << 6) | (cc & 0x3F);
  }
  i += 1 + static_cast<std::size_t>(extra);
  return cp;
}

inline void encode_utf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

// Characters stripped from token edges. ASCII non-alphanumerics (including
// the apostrophe), the Unicode general punctuation block (dashes, curly
// quotes, ellipsis), and Latin-1 punctuation/signs.
inline bool is_edge_punct(char32_t cp) {
  if (cp < 0x80) {
    return !((cp >= '0' && cp <= '9') || (cp >= 'a' && cp <= 'z') ||
             (cp >= 'A' && cp <= 'Z'));
  }
  if (cp >= 0x2000 && cp <= 0x206F) return true;
  if (cp >= 0x00A1 && cp <= 0x00BF) return true;
  return cp == 0xFFFD;
}

}  // namespace detail

/// Lowercases and strips leading/trailing punctuation. Internal apostrophes
/// survive ("y'know" stays intact; curly apostrophes are mapped to ASCII).
/// Punctuation-only input yields the empty string. Total and idempotent.
inline std::string normalize_token(std::string_view raw) {
  std::vector<char32_t> cps;
  cps.reserve(raw.size());
  for (std::size_t i = 0; i < raw.size();) {
    char32_t cp = detail::decode_utf8(raw, i);
    if (cp == 0x2018 || cp == 0x2019) cp = '\'';
    if (cp >= 'A' && cp <= 'Z') cp += 0x20;
    cps.push_back(cp);
  }
  std::size_t b = 0;
  std::size_t e = cps.size();
  while (b < e && detail::is_edge_punct(cps[b])) ++b;
  while (e > b && detail::is_edge_punct(cps[e - 1])) --e;
  std::string out;
  for (std::size_t i = b; i < e; ++i) detail::encode_utf8(out, cps[i]);
  return out;
}

/// One unwanted word/phrase, normalized. `id` doubles as the spearcon asset
/// name (tokens joined by '_').
struct TargetPhrase {
  std::string id;
  std::vector<std::string> tokens;
  std::string spearcon_ref;
};

/// Compiled prefix structure (token trie) over all target phrases.
class TargetSet {
 public:
  static constexpr std::size_t kNoPhrase = std::numeric_limits<std::size_t>::max();

  const std::vector<TargetPhrase>& phrases() const { return phrases_; }
  std::size_t max_phrase_len() const { return max_len_; }

  std::size_t root() const { return 0; }

  /// Child node for `token`, or kNoNode.
  static constexpr std::size_t kNoNode = std::numeric_limits<std::size_t>::max();
  std::size_t step(std::size_t node, const std::string& token) const {
    const auto& children = nodes_[node].children;
    auto it = children.find(token);
    return it == children.end() ? kNoNode : it->second;
  }

  /// Phrase index terminating at `node`, or kNoPhrase.
  std::size_t terminal(std::size_t node) const { return nodes_[node].phrase; }

  bool has_children(std::size_t node) const {
    return !nodes_[node].children.empty();
  }

 private:
  struct Node {
    std::map<std::string, std::size_t> children;
    std::size_t phrase = kNoPhrase;
  };
  std::vector<Node> nodes_{Node{}};
  std::vector<TargetPhrase> phrases_;
  std::size_t max_len_ = 0;

  friend TargetSet compile_targets(const std::vector<std::string>&, std::size_t);
};

namespace detail {

inline std::vector<std::string> phrase_tokens(const std::string& phrase) {
  std::vector<std::string> tokens;
  std::istringstream in(phrase);
  std::string piece;
  while (in >> piece) {
    std::string norm = normalize_token(piece);
    if (!norm.empty()) tokens.push_back(std::move(norm));
  }
  return tokens;
}

}  // namespace detail

/// Builds a TargetSet from raw phrase strings ("Like", "you know", ...).
/// Phrases that normalize to the same token sequence are duplicates.
inline TargetSet compile_targets(const std::vector<std::string>& phrases,
                                 std::size_t max_tokens = 5) {
  if (phrases.empty()) raise(Errc::EmptyPhrase, "target phrase list is empty");
  TargetSet set;
  for (const auto& raw : phrases) {
    std::vector<std::string> tokens = detail::phrase_tokens(raw);
    if (tokens.empty())
      raise(Errc::EmptyPhrase, "phrase \"" + raw + "\" normalizes to nothing");
    if (tokens.size() > max_tokens)
      raise(Errc::TooLong, "phrase \"" + raw + "\" has " +
                               std::to_string(tokens.size()) +
                               " tokens (max " + std::to_string(max_tokens) + ")");
    std::size_t node = set.root();
    for (const auto& tok : tokens) {
      std::size_t next = set.step(node, tok);
      if (next == TargetSet::kNoNode) {
        next = set.nodes_.size();
        set.nodes_.emplace_back();
        set.nodes_[node].children.emplace(tok, next);
      }
      node = next;
    }
    if (set.nodes_[node].phrase != TargetSet::kNoPhrase)
      raise(Errc::DuplicatePhrase, "phrase \"" + raw + "\" duplicates an earlier target");
    std::string id = tokens.front();
    for (std::size_t i = 1; i < tokens.size(); ++i) id += "_" + tokens[i];
    set.nodes_[node].phrase = set.phrases_.size();
    set.phrases_.push_back(TargetPhrase{id, tokens, id});
    set.max_len_ = std::max(set.max_len_, tokens.size());
  }
  return set;
}

/// A completed match. `span_first/span_last` are indices into the accepted
/// token stream; spans of distinct detections never overlap.
struct DetectionEvent {
  std::string phrase_id;
  std::int64_t utterance_end_ms = 0;
  std::int64_t detected_at_ms = 0;
  std::size_t span_first = 0;
  std::size_t span_last = 0;
};

/// Ingestion state: dedup tail plus ordering watermark.
class IngestState {
 public:
  std::size_t accepted_count() const { return accepted_count_; }

 private:
  struct Recent {
    std::string norm;
    std::int64_t start_ms;
  };
  std::deque<Recent> recent_;
  std::int64_t last_start_ms_ = std::numeric_limits<std::int64_t>::min();
  std::size_t accepted_count_ = 0;

  friend std::vector<WordEvent> ingest_segment(IngestState&,
                                               const std::vector<WordEvent>&,
                                               bool, std::int64_t);
};

/// Accepts a recognizer segment. Non-finalized segments are ignored entirely;
/// a word is dropped as a duplicate when an already-accepted word has the same
/// normalized text and a start within the dedup window. Punctuation-only
/// "words" are dropped. Accepted words keep non-decreasing start order.
inline std::vector<WordEvent> ingest_segment(IngestState& state,
                                             const std::vector<WordEvent>& segment,
                                             bool finalized,
                                             std::int64_t dedup_window_ms = 150) {
  std::vector<WordEvent> accepted;
  if (!finalized) return accepted;
  std::int64_t prev_start = std::numeric_limits<std::int64_t>::min();
  for (const auto& word : segment) {
    if (word.start_ms > word.end_ms)
      raise(Errc::OutOfOrder, "word \"" + word.text + "\" starts after it ends");
    if (word.start_ms < prev_start)
      raise(Errc::OutOfOrder, "segment not ordered by start_ms at \"" + word.text + "\"");
    prev_start = word.start_ms;

    std::string norm = normalize_token(word.text);
    if (norm.empty()) continue;

    while (!state.recent_.empty() &&
           state.recent_.front().start_ms < word.start_ms - dedup_window_ms)
      state.recent_.pop_front();
    bool duplicate = false;
    for (const auto& r : state.recent_) {
      if (r.norm == norm &&
          std::llabs(r.start_ms - word.start_ms) <= dedup_window_ms) {
        duplicate = true;
        break;
      }
    }
    if (duplicate) continue;

    if (state.accepted_count_ > 0 && word.start_ms < state.last_start_ms_)
      raise(Errc::OutOfOrder,
            "word \"" + word.text + "\" at " + std::to_string(word.start_ms) +
                " ms overlaps inconsistently with an accepted word at " +
                std::to_string(state.last_start_ms_) + " ms");

    state.recent_.push_back({norm, word.start_ms});
    state.last_start_ms_ = word.start_ms;
    ++state.accepted_count_;
    accepted.push_back(word);
  }
  return accepted;
}

/// Matcher state: the rolling tail of tokens that may still begin or extend
/// a phrase (never longer than max_phrase_len).
class MatchState {
 public:
  std::size_t tokens_seen() const { return next_index_; }

 private:
  struct Pending {
    std::string token;
    std::int64_t end_ms;
    std::size_t index;
  };
  std::deque<Pending> pending_;
  std::size_t next_index_ = 0;

  friend std::vector<DetectionEvent> detail_resolve(MatchState&, const TargetSet&,
                                                    std::int64_t, bool);
  friend std::vector<DetectionEvent> match_stream(MatchState&, const WordEvent&,
                                                  const TargetSet&, std::int64_t);
};

/// Resolves the pending tail. Greedy leftmost-longest: at the current start
/// token, the longest phrase that can no longer be extended wins and consumes
/// its tokens; a start that completes nothing is discarded as filler. When a
/// longer match might still complete with future tokens, resolution waits
/// (unless flushing at end of stream).
inline std::vector<DetectionEvent> detail_resolve(MatchState& state,
                                                  const TargetSet& targets,
                                                  std::int64_t now_ms, bool flush) {
  std::vector<DetectionEvent> out;
  for (;;) {
    if (state.pending_.empty()) break;
    std::size_t node = targets.root();
    std::size_t best_depth = 0;
    std::size_t best_phrase = TargetSet::kNoPhrase;
    std::size_t depth = 0;
    bool open = false;
    while (depth < state.pending_.size()) {
      const std::size_t next = targets.step(node, state.pending_[depth].token);
      if (next == TargetSet::kNoNode) break;
      node = next;
      ++depth;
      if (targets.terminal(node) != TargetSet::kNoPhrase) {
        best_depth = depth;
        best_phrase = targets.terminal(node);
      }
    }
    if (depth == state.pending_.size() && targets.has_children(node))
      open = true;
    if (open && !flush) break;

    if (best_phrase != TargetSet::kNoPhrase) {
      const auto& first = state.pending_.front();
      const auto& last = state.pending_[best_depth - 1];
      out.push_back(DetectionEvent{targets.phrases()[best_phrase].id,
                                   last.end_ms, now_ms, first.index, last.index});
      for (std::size_t i = 0; i < best_depth; ++i) state.pending_.pop_front();
    } else {
      state.pending_.pop_front();
    }
  }
  return out;
}

/// Feeds one accepted word into the matcher; returns matches completed by it.
/// `detected_at_ms` of each detection is `now_ms`.
inline std::vector<DetectionEvent> match_stream(MatchState& state,
                                                const WordEvent& word,
                                                const TargetSet& targets,
                                                std::int64_t now_ms) {
  std::string token = normalize_token(word.text);
  if (token.empty()) return {};
  state.pending_.push_back({std::move(token), word.end_ms, state.next_index_});
  ++state.next_index_;
  return detail_resolve(state, targets, now_ms, /*flush=*/false);
}

/// Flushes the matcher at end of stream; pending prefixes are resolved as if
/// no further tokens will arrive.
inline std::vector<DetectionEvent> finish_stream(MatchState& state,
                                                 const TargetSet& targets,
                                                 std::int64_t now_ms) {
  return detail_resolve(state, targets, now_ms, /*flush=*/true);
}

/// Total speaking time: merged word intervals, where a gap no longer than
/// `pause_threshold_ms` counts as speaking. Words must be ordered by start.
inline std::int64_t speaking_time(const std::vector<WordEvent>& words,
                                  std::int64_t pause_threshold_ms = 1000) {
  std::int64_t total = 0;
  bool have = false;
  std::int64_t cur_start = 0;
  std::int64_t cur_end = 0;
  for (const auto& w : words) {
    if (!have) {
      cur_start = w.start_ms;
      cur_end = w.end_ms;
      have = true;
    } else if (w.start_ms - cur_end <= pause_threshold_ms) {
      cur_end = std::max(cur_end, w.end_ms);
    } else {
      total += cur_end - cur_start;
      cur_start = w.start_ms;
      cur_end = w.end_ms;
    }
  }
  if (have) total += cur_end - cur_start;
  return total;
}

}  // namespace speechcoach
