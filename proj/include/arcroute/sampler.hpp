#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <regex>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "arcroute/datetime.hpp"
#include "arcroute/error.hpp"
#include "arcroute/io.hpp"
#include "arcroute/memento.hpp"
#include "arcroute/random.hpp"
#include "arcroute/uri.hpp"

namespace arcroute {

enum class SourceKind {
  kDirectoryRandom,
  kDirectoryTld,
  kDirectoryLanguage,
  kFulltext,
  kWaybackLog,
  kAggregatorLog,
};

inline std::string_view source_kind_name(SourceKind k) {
  switch (k) {
    case SourceKind::kDirectoryRandom: return "directory_random";
    case SourceKind::kDirectoryTld: return "directory_tld";
    case SourceKind::kDirectoryLanguage: return "directory_language";
    case SourceKind::kFulltext: return "fulltext";
    case SourceKind::kWaybackLog: return "wayback_log";
    case SourceKind::kAggregatorLog: return "aggregator_log";
  }
  return "unknown";
}

struct SampleEntry {
  OriginalUri uri;
  std::optional<TldLabel> tld;
  std::optional<std::string> language;  // ISO-639 code
  std::optional<ArchiveId> source;

  friend bool operator==(const SampleEntry&, const SampleEntry&) = default;
};

/// Hostified URIs with unique hostnames, kept sorted by URI.
class UriSample {
 public:
  UriSample(std::string name, SourceKind kind, std::vector<SampleEntry> entries)
      : name_(std::move(name)), kind_(kind), entries_(std::move(entries)) {
    std::sort(entries_.begin(), entries_.end(),
              [](const SampleEntry& a, const SampleEntry& b) { return a.uri < b.uri; });
    for (std::size_t i = 0; i < entries_.size(); ++i) {
      if (hostify(entries_[i].uri) != entries_[i].uri)
        throw Error(Errc::kInvalidUri, "sample entry not hostified: " + entries_[i].uri.str());
      if (i > 0 && entries_[i - 1].uri == entries_[i].uri)
        throw Error(Errc::kInvalidUri, "duplicate host in sample: " + entries_[i].uri.str());
    }
  }

  const std::string& name() const noexcept { return name_; }
  SourceKind kind() const noexcept { return kind_; }
  const std::vector<SampleEntry>& entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }

  const SampleEntry* find(const OriginalUri& uri) const {
    auto it = std::lower_bound(entries_.begin(), entries_.end(), uri,
                               [](const SampleEntry& e, const OriginalUri& u) { return e.uri < u; });
    return it != entries_.end() && it->uri == uri ? &*it : nullptr;
  }

  bool contains(const OriginalUri& uri) const { return find(uri) != nullptr; }

 private:
  std::string name_;
  SourceKind kind_;
  std::vector<SampleEntry> entries_;
};

struct SampleSpec {
  std::uint64_t rng_seed = 0;
  double tld_fraction = 0.02;
  std::size_t tld_floor = 100;
  std::size_t per_language_count = 100;

  void validate() const {
    if (!(tld_fraction > 0.0 && tld_fraction <= 1.0))
      throw Error(Errc::kInvalidPolicy, "tld_fraction must be in (0, 1]");
    if (tld_floor < 1) throw Error(Errc::kInvalidPolicy, "tld_floor must be >= 1");
  }
};

/// Hosts to draw for a TLD with `available` hosts:
/// min(available, max(ceil(fraction * available), floor)).
inline std::size_t controlled_tld_quota(std::size_t available, double fraction, std::size_t floor) {
  const double share = fraction * static_cast<double>(available);
  const double nearest = std::round(share);
  // Products like 0.02 * 10000 land a hair above the integer.
  const auto pct = static_cast<std::size_t>(std::abs(share - nearest) < 1e-9 ? nearest
                                                                             : std::ceil(share));
  return std::min(available, std::max(pct, floor));
}

namespace detail {

/// Hostify + dedup + sort; entries failing hostify are dropped.
inline std::vector<OriginalUri> unique_hosts(std::span<const OriginalUri> universe) {
  std::set<OriginalUri> hosts;
  for (const auto& u : universe) {
    try {
      hosts.insert(hostify(u));
    } catch (const Error&) {
    }
  }
  return {hosts.begin(), hosts.end()};
}

}  // namespace detail

inline UriSample sample_random(std::span<const OriginalUri> universe, std::size_t n,
                               const SampleSpec& spec, std::string name = "random") {
  spec.validate();
  auto hosts = detail::unique_hosts(universe);
  if (hosts.empty()) throw Error(Errc::kEmptyUniverse, "no hostnames in universe");
  Rng rng(spec.rng_seed);
  std::vector<SampleEntry> entries;
  for (auto i : choose_indices(hosts.size(), n, rng)) entries.push_back({hosts[i], {}, {}, {}});
  return UriSample(std::move(name), SourceKind::kDirectoryRandom, std::move(entries));
}

struct TldQuota {
  std::size_t available = 0;
  std::size_t selected = 0;
};

struct ControlledTldSample {
  UriSample sample;
  std::map<TldLabel, TldQuota> quotas;
  std::vector<TldLabel> unknown_tlds;  // requested but absent from the universe
};

/// Each TLD draws from its own seed stream, so adding or removing a TLD
/// from the request does not change the hosts picked for the others.
inline ControlledTldSample sample_controlled_tld(std::span<const OriginalUri> universe,
                                                 std::span<const TldLabel> tlds,
                                                 const SampleSpec& spec,
                                                 const TldExtractor& extract = {},
                                                 std::string name = "tld") {
  spec.validate();
  if (tlds.empty()) throw Error(Errc::kInvalidPolicy, "no TLDs requested");
  auto hosts = detail::unique_hosts(universe);
  if (hosts.empty()) throw Error(Errc::kEmptyUniverse, "no hostnames in universe");

  std::map<TldLabel, std::vector<OriginalUri>> by_tld;
  for (auto& h : hosts) {
    try {
      by_tld[extract(h)].push_back(h);
    } catch (const Error&) {
    }
  }
  std::set<TldLabel> wanted;
  for (const auto& t : tlds) wanted.insert(detail::to_lower(t));

  std::vector<SampleEntry> entries;
  std::map<TldLabel, TldQuota> quotas;
  std::vector<TldLabel> unknown;
  for (const auto& tld : wanted) {
    auto it = by_tld.find(tld);
    if (it == by_tld.end()) {
      unknown.push_back(tld);
      quotas[tld] = {0, 0};
      continue;
    }
    const auto& pool = it->second;
    auto quota = controlled_tld_quota(pool.size(), spec.tld_fraction, spec.tld_floor);
    Rng rng(keyed_seed(spec.rng_seed, "tld:" + tld));
    for (auto i : choose_indices(pool.size(), quota, rng)) entries.push_back({pool[i], tld, {}, {}});
    quotas[tld] = {pool.size(), quota};
  }
  return {UriSample(std::move(name), SourceKind::kDirectoryTld, std::move(entries)),
          std::move(quotas), std::move(unknown)};
}

struct LabeledUri {
  OriginalUri uri;
  std::string language;
};

/// A host listed under several languages stays with the first language
/// (in sorted order) that draws it.
inline UriSample sample_controlled_language(std::span<const LabeledUri> universe,
                                            const SampleSpec& spec,
                                            std::string name = "language") {
  spec.validate();
  std::map<std::string, std::set<OriginalUri>> by_lang;
  for (const auto& e : universe) {
    if (e.language.empty()) throw Error(Errc::kMissingLanguageLabels, e.uri.str());
    try {
      by_lang[detail::to_lower(e.language)].insert(hostify(e.uri));
    } catch (const Error&) {
    }
  }
  if (by_lang.empty()) throw Error(Errc::kEmptyUniverse, "no labeled hostnames in universe");

  std::vector<SampleEntry> entries;
  std::set<OriginalUri> taken;
  for (const auto& [lang, set] : by_lang) {
    std::vector<OriginalUri> pool;
    for (const auto& h : set)
      if (!taken.count(h)) pool.push_back(h);
    Rng rng(keyed_seed(spec.rng_seed, "lang:" + lang));
    for (auto i : choose_indices(pool.size(), spec.per_language_count, rng)) {
      taken.insert(pool[i]);
      entries.push_back({pool[i], {}, lang, {}});
    }
  }
  return UriSample(std::move(name), SourceKind::kDirectoryLanguage, std::move(entries));
}

// ---------------------------------------------------------------------------
// Fulltext search results

struct FulltextIngest {
  UriSample sample;
  std::map<ArchiveId, UriSample> by_source;
  std::vector<std::string> warnings;
  std::size_t rows = 0;

  std::map<ArchiveId, std::size_t> unique_hosts_by_archive() const {
    std::map<ArchiveId, std::size_t> counts;
    for (const auto& [id, s] : by_source) counts[id] = s.size();
    return counts;
  }
};

/// Rows are `archive_id<TAB>query<TAB>rank<TAB>uri` with rank in 1..10.
/// Bad rows are skipped with a warning naming file and line.
inline FulltextIngest ingest_fulltext_text(std::span<const std::pair<std::string, std::string>> files,
                                           std::string name = "fulltext") {
  std::vector<SampleEntry> combined;
  std::set<OriginalUri> seen;
  std::map<ArchiveId, std::vector<SampleEntry>> per_source;
  std::map<ArchiveId, std::set<OriginalUri>> per_source_seen;
  std::vector<std::string> warnings;
  std::size_t rows = 0;

  for (const auto& [label, text] : files) {
    for_each_line(text, [&](std::size_t line_no, std::string_view line) {
      if (is_blank_or_comment(line)) return;
      auto warn = [&](const std::string& what) {
        warnings.push_back(RowError(line_no, label + ": " + what).what());
      };
      auto f = split_tabs(line);
      if (f.size() != 4) return warn("expected 4 tab-separated fields");
      int rank = 0;
      auto [p, ec] = std::from_chars(f[2].data(), f[2].data() + f[2].size(), rank);
      if (ec != std::errc{} || p != f[2].data() + f[2].size() || rank < 1 || rank > 10)
        return warn("rank must be an integer in 1..10");
      try {
        ArchiveId archive{std::string(detail::trim(f[0]))};
        auto host = hostify_lenient(f[3]);
        ++rows;
        if (per_source_seen[archive].insert(host).second)
          per_source[archive].push_back({host, {}, {}, archive});
        if (seen.insert(host).second) combined.push_back({host, {}, {}, archive});
      } catch (const Error& e) {
        warn(e.what());
      }
    });
  }

  std::map<ArchiveId, UriSample> by_source;
  for (auto& [id, entries] : per_source)
    by_source.emplace(id, UriSample(name + "-" + id.str(), SourceKind::kFulltext, std::move(entries)));
  return {UriSample(std::move(name), SourceKind::kFulltext, std::move(combined)),
          std::move(by_source), std::move(warnings), rows};
}

inline FulltextIngest ingest_fulltext_results(std::span<const std::filesystem::path> paths,
                                              std::string name = "fulltext") {
  std::vector<std::pair<std::string, std::string>> files;
  for (const auto& p : paths) files.emplace_back(p.string(), read_file(p));
  return ingest_fulltext_text(files, std::move(name));
}

// ---------------------------------------------------------------------------
// Access logs

enum class RequestKind { kMemento, kTimeMap, kOther };

struct AccessLogRecord {
  Instant timestamp;
  std::string request_path;
  RequestKind kind = RequestKind::kOther;
  std::optional<std::string> embedded_uri;  // set for memento / TimeMap requests
};

/// Request-path patterns; the last capture group must be the embedded URI.
struct LogPatterns {
  std::regex memento{R"(^/(?:[^/]+/)?\d{14}(?:[a-z]{2}_)?/(.+)$)"};
  std::regex timemap{R"(^/(?:[^/]+/)?timemap/(?:link/)?(.+)$)"};

  static LogPatterns from_strings(const std::string& memento, const std::string& timemap) {
    LogPatterns p;
    try {
      p.memento = std::regex(memento);
      p.timemap = std::regex(timemap);
    } catch (const std::regex_error& e) {
      throw Error(Errc::kInvalidConfig, std::string("bad log pattern: ") + e.what());
    }
    return p;
  }
};

inline AccessLogRecord classify_request(Instant when, std::string path, const LogPatterns& patterns) {
  AccessLogRecord rec{when, std::move(path), RequestKind::kOther, std::nullopt};
  std::smatch m;
  if (std::regex_match(rec.request_path, m, patterns.timemap) && m.size() > 1) {
    rec.kind = RequestKind::kTimeMap;
    rec.embedded_uri = m[m.size() - 1].str();
  } else if (std::regex_match(rec.request_path, m, patterns.memento) && m.size() > 1) {
    rec.kind = RequestKind::kMemento;
    rec.embedded_uri = m[m.size() - 1].str();
  }
  return rec;
}

/// Parses one Common/Combined Log Format line; nullopt when malformed.
inline std::optional<AccessLogRecord> parse_access_log_line(std::string_view line,
                                                            const LogPatterns& patterns) {
  static const std::regex kClf(R"(^\S+ \S+ \S+ \[([^\]]+)\] "(\S+) (\S+)[^"]*" \d{3} \S+.*$)");
  std::match_results<std::string_view::const_iterator> m;
  if (!std::regex_match(line.begin(), line.end(), m, kClf)) return std::nullopt;
  auto when = parse_clf_datetime(std::string_view(&*m[1].first, m[1].length()));
  if (!when) return std::nullopt;
  return classify_request(*when, m[3].str(), patterns);
}

struct ParsedLog {
  std::vector<AccessLogRecord> records;
  std::vector<std::string> warnings;
};

inline ParsedLog parse_access_log(std::string_view text, const LogPatterns& patterns,
                                  const std::string& label = "log") {
  ParsedLog out;
  for_each_line(text, [&](std::size_t line_no, std::string_view line) {
    if (detail::trim(line).empty()) return;
    if (auto rec = parse_access_log_line(line, patterns))
      out.records.push_back(std::move(*rec));
    else
      out.warnings.push_back(RowError(line_no, label + ": not a common log format line").what());
  });
  return out;
}

inline UriSample sample_from_logs(std::span<const AccessLogRecord> records, std::size_t n,
                                  const SampleSpec& spec,
                                  SourceKind kind = SourceKind::kWaybackLog,
                                  std::string name = "logs") {
  std::vector<OriginalUri> originals;
  for (const auto& r : records) {
    if (r.kind == RequestKind::kOther || !r.embedded_uri) continue;
    try {
      originals.push_back(hostify_lenient(*r.embedded_uri));
    } catch (const Error&) {
    }
  }
  if (originals.empty())
    throw Error(Errc::kNoExtractableRequests, "no memento or TimeMap requests with a host");
  auto sample = sample_random(originals, n, spec, std::move(name));
  auto entries = sample.entries();
  return UriSample(sample.name(), kind, std::move(entries));
}

// ---------------------------------------------------------------------------
// File formats

struct Universe {
  std::vector<OriginalUri> uris;
  std::vector<std::string> warnings;
};

namespace detail {

inline std::optional<OriginalUri> as_original(std::string_view raw) {
  raw = trim(raw);
  auto parts = split_uri(raw);
  try {
    if (parts && !parts->host.empty()) return OriginalUri(std::string(raw));
    return OriginalUri("http://" + std::string(raw));
  } catch (const Error&) {
    return std::nullopt;
  }
}

}  // namespace detail

/// One URI per line; `#` comments. Scheme-less lines get "http://".
inline Universe parse_universe(std::string_view text) {
  Universe u;
  for_each_line(text, [&](std::size_t line_no, std::string_view line) {
    if (is_blank_or_comment(line)) return;
    if (auto uri = detail::as_original(line))
      u.uris.push_back(std::move(*uri));
    else
      u.warnings.push_back(RowError(line_no, "not a URI with a host").what());
  });
  return u;
}

struct LanguageUniverse {
  std::vector<LabeledUri> uris;
  std::vector<std::string> warnings;
};

/// `uri<TAB>lang` per line.
inline LanguageUniverse parse_language_universe(std::string_view text) {
  LanguageUniverse u;
  for_each_line(text, [&](std::size_t line_no, std::string_view line) {
    if (is_blank_or_comment(line)) return;
    auto f = split_tabs(line);
    auto lang = f.size() == 2 ? detail::trim(f[1]) : std::string_view{};
    if (lang.empty()) {
      u.warnings.push_back(RowError(line_no, "expected uri<TAB>lang").what());
      return;
    }
    if (auto uri = detail::as_original(f[0]))
      u.uris.push_back({std::move(*uri), std::string(lang)});
    else
      u.warnings.push_back(RowError(line_no, "not a URI with a host").what());
  });
  return u;
}

/// `uri<TAB>tld<TAB>lang<TAB>source_archive`, empty fields allowed.
inline std::string format_sample(const UriSample& sample) {
  std::string out;
  for (const auto& e : sample.entries()) {
    out += e.uri.str();
    out += '\t';
    out += e.tld.value_or("");
    out += '\t';
    out += e.language.value_or("");
    out += '\t';
    out += e.source ? e.source->str() : "";
    out += '\n';
  }
  return out;
}

/// Reads a sample file. Entries are hostified; a repeated host keeps its
/// first row.
inline UriSample parse_sample(std::string_view text, std::string name,
                              SourceKind kind = SourceKind::kDirectoryRandom) {
  std::vector<SampleEntry> entries;
  std::set<OriginalUri> seen;
  for_each_line(text, [&](std::size_t line_no, std::string_view line) {
    if (is_blank_or_comment(line)) return;
    auto f = split_tabs(line);
    if (f.size() > 4) throw RowError(line_no, "more than 4 fields");
    OriginalUri uri = [&] {
      try {
        return hostify_lenient(f[0]);
      } catch (const Error& e) {
        throw RowError(line_no, e.what());
      }
    }();
    if (!seen.insert(uri).second) return;
    SampleEntry e{uri, {}, {}, {}};
    if (f.size() > 1 && !f[1].empty()) e.tld = detail::to_lower(f[1]);
    if (f.size() > 2 && !f[2].empty()) e.language = std::string(f[2]);
    if (f.size() > 3 && !f[3].empty()) {
      try {
        e.source = ArchiveId(std::string(f[3]));
      } catch (const Error& err) {
        throw RowError(line_no, err.what());
      }
    }
    entries.push_back(std::move(e));
  });
  return UriSample(std::move(name), kind, std::move(entries));
}

}  // namespace arcroute
