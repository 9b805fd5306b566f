#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace arcroute {

enum class Errc {
  kMalformedLink,
  kMissingOriginal,
  kBadDatetime,
  kMixedOriginals,
  kInvalidUri,
  kInvalidArchiveId,
  kNoHost,
  kNoTld,
  kEmptyUniverse,
  kMalformedRow,
  kNoExtractableRequests,
  kSampleMismatch,
  kMissingLanguageLabels,
  kNoData,
  kSampleTooSmall,
  kInvalidPolicy,
  kInvalidConfig,
  kIo,
};

inline std::string_view errc_name(Errc code) {
  switch (code) {
    case Errc::kMalformedLink: return "MalformedLink";
    case Errc::kMissingOriginal: return "MissingOriginal";
    case Errc::kBadDatetime: return "BadDatetime";
    case Errc::kMixedOriginals: return "MixedOriginals";
    case Errc::kInvalidUri: return "InvalidUri";
    case Errc::kInvalidArchiveId: return "InvalidArchiveId";
    case Errc::kNoHost: return "NoHost";
    case Errc::kNoTld: return "NoTld";
    case Errc::kEmptyUniverse: return "EmptyUniverse";
    case Errc::kMalformedRow: return "MalformedRow";
    case Errc::kNoExtractableRequests: return "NoExtractableRequests";
    case Errc::kSampleMismatch: return "SampleMismatch";
    case Errc::kMissingLanguageLabels: return "MissingLanguageLabels";
    case Errc::kNoData: return "NoData";
    case Errc::kSampleTooSmall: return "SampleTooSmall";
    case Errc::kInvalidPolicy: return "InvalidPolicy";
    case Errc::kInvalidConfig: return "InvalidConfig";
    case Errc::kIo: return "Io";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above so
/// callers (and the CLI exit-code mapping) can switch on it.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

/// Row-level failure in a line-oriented input file.
class RowError : public Error {
 public:
  RowError(std::size_t line, const std::string& what)
      : Error(Errc::kMalformedRow, "line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace arcroute
