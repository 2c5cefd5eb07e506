// speechcoach/error.hpp
//
// Copyright (c)  2026  speechcoach authors
// Licensed under the Apache License, Version 2.0.

#pragma once

#include <stdexcept>
#include <string>

namespace speechcoach {

// Stable error codes. The CLI prints them verbatim as stderr prefixes
// ("E_MISSING_ASSET: ..."), so names here are part of the tool's contract.
enum class Errc {
  EmptyPhrase,
  DuplicatePhrase,
  TooLong,
  OutOfOrder,
  ClipTooShort,
  InvalidFactor,
  SilentClip,
  BadWav,
  MissingAsset,
  MissingSource,
  SourceFormat,
  ZeroSpeakingTime,
  ZeroWordCount,
  ZeroBaseline,
  DegenerateX,
  ZeroVariance,
  LengthMismatch,
  DegenerateMarginals,
  MissingSessions,
  CsvSchema,
  InvalidRange,
  Config,
  Io,
};

inline const char* errc_name(Errc c) {
  switch (c) {
    case Errc::EmptyPhrase:         return "E_EMPTY_PHRASE";
    case Errc::DuplicatePhrase:     return "E_DUPLICATE_PHRASE";
    case Errc::TooLong:             return "E_TOO_LONG";
    case Errc::OutOfOrder:          return "E_OUT_OF_ORDER";
    case Errc::ClipTooShort:        return "E_CLIP_TOO_SHORT";
    case Errc::InvalidFactor:       return "E_INVALID_FACTOR";
    case Errc::SilentClip:          return "E_SILENT_CLIP";
    case Errc::BadWav:              return "E_BAD_WAV";
    case Errc::MissingAsset:        return "E_MISSING_ASSET";
    case Errc::MissingSource:       return "E_MISSING_SOURCE";
    case Errc::SourceFormat:        return "E_SOURCE_FORMAT";
    case Errc::ZeroSpeakingTime:    return "E_ZERO_SPEAKING_TIME";
    case Errc::ZeroWordCount:       return "E_ZERO_WORD_COUNT";
    case Errc::ZeroBaseline:        return "E_ZERO_BASELINE";
    case Errc::DegenerateX:         return "E_DEGENERATE_X";
    case Errc::ZeroVariance:        return "E_ZERO_VARIANCE";
    case Errc::LengthMismatch:      return "E_LENGTH_MISMATCH";
    case Errc::DegenerateMarginals: return "E_DEGENERATE_MARGINALS";
    case Errc::MissingSessions:     return "E_MISSING_SESSIONS";
    case Errc::CsvSchema:           return "E_CSV_SCHEMA";
    case Errc::InvalidRange:        return "E_INVALID_RANGE";
    case Errc::Config:              return "E_CONFIG";
    case Errc::Io:                  return "E_IO";
  }
  return "E_UNKNOWN";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  Errc code() const noexcept { return code_; }
  const char* code_name() const noexcept { return errc_name(code_); }

 private:
  Errc code_;
};

[[noreturn]] inline void raise(Errc code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace speechcoach
