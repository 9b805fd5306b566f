#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "arcroute/datetime.hpp"
#include "arcroute/memento.hpp"

namespace arcroute {

enum class Outcome { kOk, kNotFound, kTimeout, kError };

inline std::string_view outcome_name(Outcome o) {
  switch (o) {
    case Outcome::kOk: return "ok";
    case Outcome::kNotFound: return "not-found";
    case Outcome::kTimeout: return "timeout";
    case Outcome::kError: return "error";
  }
  return "unknown";
}

/// One archive's answer for one original URI.
struct LookupResult {
  ArchiveId archive;
  OriginalUri original;
  std::optional<TimeMap> timemap;  // absent unless outcome is kOk
  Instant fetched_at{};
  Outcome outcome = Outcome::kNotFound;
  std::string detail;  // failure description for timeout / error

  /// An empty TimeMap is a miss.
  bool found() const { return timemap && !timemap->empty(); }
  bool failed() const { return outcome == Outcome::kTimeout || outcome == Outcome::kError; }
};

}  // namespace arcroute
