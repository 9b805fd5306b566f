#pragma once

#include <algorithm>
#include <cstdio>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "arcroute/datetime.hpp"
#include "arcroute/error.hpp"
#include "arcroute/lookup.hpp"
#include "arcroute/memento.hpp"
#include "arcroute/sampler.hpp"
#include "arcroute/uri.hpp"

namespace arcroute {

struct ArchiveCoverage {
  std::size_t found = 0;
  std::size_t size = 0;
  double ratio() const { return size == 0 ? 0.0 : static_cast<double>(found) / static_cast<double>(size); }
};

struct CoverageReport {
  std::string sample;
  std::map<ArchiveId, ArchiveCoverage> archives;
  std::vector<std::string> warnings;
};

namespace detail {

/// First result per (archive, uri); later duplicates are ignored.
template <typename Fn>
void for_each_unique_result(std::span<const LookupResult> results, Fn&& fn) {
  std::set<std::pair<ArchiveId, OriginalUri>> seen;
  for (const auto& r : results)
    if (seen.emplace(r.archive, r.original).second) fn(r);
}

inline std::set<ArchiveId> archives_in(std::span<const LookupResult> results) {
  std::set<ArchiveId> ids;
  for (const auto& r : results) ids.insert(r.archive);
  return ids;
}

}  // namespace detail

/// Found / sample size per archive. `archives` lists archives that should
/// appear even if they have no lookups (reported as 0 with a warning).
inline CoverageReport compute_coverage(const UriSample& sample, std::span<const LookupResult> results,
                                       std::span<const ArchiveId> archives = {}) {
  CoverageReport report{sample.name(), {}, {}};
  for (const auto& r : results)
    if (!sample.contains(r.original))
      throw Error(Errc::kSampleMismatch, r.original.str() + " (" + r.archive.str() + ")");
  for (const auto& id : detail::archives_in(results)) report.archives[id] = {0, sample.size()};
  for (const auto& id : archives) {
    if (!report.archives.count(id)) {
      report.archives[id] = {0, sample.size()};
      report.warnings.push_back("archive " + id.str() + " has no lookups; coverage reported as 0");
    }
  }
  detail::for_each_unique_result(results, [&](const LookupResult& r) {
    if (r.found()) ++report.archives[r.archive].found;
  });
  return report;
}

/// Square over `archives` (extended by any source or target not listed).
/// Cell (s, t) is the coverage of s's sample in t; undefined when s has no
/// sample or t has no lookups.
struct CrossCoverageMatrix {
  std::vector<ArchiveId> archives;
  std::map<std::pair<ArchiveId, ArchiveId>, ArchiveCoverage> cells;

  std::optional<double> cell(const ArchiveId& source, const ArchiveId& target) const {
    auto it = cells.find({source, target});
    if (it == cells.end()) return std::nullopt;
    return it->second.ratio();
  }
};

inline CrossCoverageMatrix compute_cross_coverage(const std::map<ArchiveId, UriSample>& samples_by_source,
                                                  std::span<const LookupResult> results,
                                                  std::span<const ArchiveId> archives = {}) {
  CrossCoverageMatrix m;
  m.archives.assign(archives.begin(), archives.end());
  auto add = [&](const ArchiveId& id) {
    if (std::find(m.archives.begin(), m.archives.end(), id) == m.archives.end()) m.archives.push_back(id);
  };
  for (const auto& [id, _] : samples_by_source) add(id);
  auto targets = detail::archives_in(results);
  for (const auto& id : targets) add(id);

  for (const auto& [source, sample] : samples_by_source) {
    if (sample.empty()) continue;
    for (const auto& target : targets) m.cells[{source, target}] = {0, sample.size()};
  }
  detail::for_each_unique_result(results, [&](const LookupResult& r) {
    if (!r.found()) return;
    for (const auto& [source, sample] : samples_by_source)
      if (sample.contains(r.original)) ++m.cells[{source, r.archive}].found;
  });
  return m;
}

struct TldShare {
  std::size_t found = 0;
  double ratio = 0.0;  // of the archive's total found URIs
};

/// Per archive, how its found URIs split across TLDs.
struct TldDistribution {
  std::map<ArchiveId, std::map<TldLabel, TldShare>> archives;

  std::optional<TldLabel> modal_tld(const ArchiveId& id) const {
    auto it = archives.find(id);
    if (it == archives.end() || it->second.empty()) return std::nullopt;
    auto best = std::max_element(it->second.begin(), it->second.end(), [](auto& a, auto& b) {
      return a.second.found < b.second.found;
    });
    return best->first;
  }
};

inline TldDistribution compute_tld_distribution(std::span<const LookupResult> results,
                                                const TldExtractor& extract = {}) {
  TldDistribution dist;
  std::map<ArchiveId, std::size_t> totals;
  for (const auto& id : detail::archives_in(results)) dist.archives[id];
  detail::for_each_unique_result(results, [&](const LookupResult& r) {
    if (!r.found()) return;
    TldLabel tld;
    try {
      tld = extract(r.original);
    } catch (const Error&) {
      return;
    }
    ++dist.archives[r.archive][tld].found;
    ++totals[r.archive];
  });
  for (auto& [id, tlds] : dist.archives)
    for (auto& [_, share] : tlds)
      share.ratio = static_cast<double>(share.found) / static_cast<double>(totals[id]);
  return dist;
}

/// (archive, language) -> coverage of that language's slice of the sample.
using LanguageDistribution = std::map<ArchiveId, std::map<std::string, ArchiveCoverage>>;

inline LanguageDistribution compute_language_distribution(const UriSample& sample,
                                                          std::span<const LookupResult> results) {
  std::map<std::string, std::size_t> slice;
  for (const auto& e : sample.entries()) {
    if (!e.language || e.language->empty())
      throw Error(Errc::kMissingLanguageLabels, "sample entry " + e.uri.str() + " has no language");
    ++slice[*e.language];
  }
  LanguageDistribution dist;
  for (const auto& r : results)
    if (!sample.contains(r.original))
      throw Error(Errc::kSampleMismatch, r.original.str() + " (" + r.archive.str() + ")");
  for (const auto& id : detail::archives_in(results))
    for (const auto& [lang, n] : slice) dist[id][lang] = {0, n};
  detail::for_each_unique_result(results, [&](const LookupResult& r) {
    if (r.found()) ++dist[r.archive][*sample.find(r.original)->language].found;
  });
  return dist;
}

struct GrowthCounts {
  std::size_t new_uris = 0;
  std::size_t mementos = 0;

  friend bool operator==(const GrowthCounts&, const GrowthCounts&) = default;
};

/// Monthly buckets (observed months only, ascending) with cumulative
/// series normalized by their totals.
struct ArchiveGrowth {
  std::vector<Month> months;
  std::vector<GrowthCounts> buckets;
  std::vector<double> cumulative_uris;
  std::vector<double> cumulative_mementos;
};

using GrowthSeries = std::map<ArchiveId, ArchiveGrowth>;

inline ArchiveGrowth growth_from_buckets(const std::map<Month, GrowthCounts>& buckets) {
  ArchiveGrowth g;
  std::size_t total_uris = 0, total_mementos = 0;
  for (const auto& [_, c] : buckets) {
    total_uris += c.new_uris;
    total_mementos += c.mementos;
  }
  std::size_t run_uris = 0, run_mementos = 0;
  for (const auto& [month, c] : buckets) {
    run_uris += c.new_uris;
    run_mementos += c.mementos;
    g.months.push_back(month);
    g.buckets.push_back(c);
    g.cumulative_uris.push_back(total_uris ? static_cast<double>(run_uris) / static_cast<double>(total_uris) : 0.0);
    g.cumulative_mementos.push_back(
        total_mementos ? static_cast<double>(run_mementos) / static_cast<double>(total_mementos) : 0.0);
  }
  return g;
}

namespace detail {

inline void add_growth(std::map<Month, GrowthCounts>& buckets, const TimeMap& tm) {
  if (tm.empty()) return;
  ++buckets[Month::of(tm.mementos().front().datetime)].new_uris;
  for (const auto& m : tm.mementos()) ++buckets[Month::of(m.datetime)].mementos;
}

}  // namespace detail

/// UTC months; a URI counts as new in the month of its earliest memento in
/// that archive.
inline GrowthSeries compute_growth(std::span<const LookupResult> results) {
  std::map<ArchiveId, std::map<Month, GrowthCounts>> buckets;
  detail::for_each_unique_result(results, [&](const LookupResult& r) {
    if (r.found()) detail::add_growth(buckets[r.archive], *r.timemap);
  });
  GrowthSeries series;
  for (const auto& [id, b] : buckets) series[id] = growth_from_buckets(b);
  return series;
}

// ---------------------------------------------------------------------------
// Profiles

struct FoundSampled {
  std::size_t found = 0;
  std::size_t sampled = 0;

  double rate() const { return sampled == 0 ? 0.0 : static_cast<double>(found) / static_cast<double>(sampled); }
  friend bool operator==(const FoundSampled&, const FoundSampled&) = default;
};

struct ArchiveProfile {
  ArchiveId archive;
  std::optional<Instant> age_start;  // absent when nothing was found
  std::map<TldLabel, FoundSampled> tld_coverage;
  std::map<std::string, FoundSampled> language_coverage;
  std::map<Month, GrowthCounts> growth;

  /// Totals over all sampled TLDs.
  FoundSampled global() const {
    FoundSampled g;
    for (const auto& [_, c] : tld_coverage) {
      g.found += c.found;
      g.sampled += c.sampled;
    }
    return g;
  }

  ArchiveGrowth growth_series() const { return growth_from_buckets(growth); }

  friend bool operator==(const ArchiveProfile&, const ArchiveProfile&) = default;
};

/// Maps sample URIs to their language labels; URIs without one are absent.
using LanguageLabels = std::map<OriginalUri, std::string>;

inline LanguageLabels language_labels(const UriSample& sample) {
  LanguageLabels labels;
  for (const auto& e : sample.entries())
    if (e.language && !e.language->empty()) labels.emplace(e.uri, *e.language);
  return labels;
}

inline ArchiveProfile build_profile(const ArchiveId& archive, std::span<const LookupResult> results,
                                    const LanguageLabels& languages = {},
                                    const TldExtractor& extract = {}) {
  ArchiveProfile p{archive, std::nullopt, {}, {}, {}};
  bool any = false;
  detail::for_each_unique_result(results, [&](const LookupResult& r) {
    if (r.archive != archive) return;
    any = true;
    const bool hit = r.found();
    try {
      auto& c = p.tld_coverage[extract(r.original)];
      ++c.sampled;
      c.found += hit;
    } catch (const Error&) {
    }
    if (auto it = languages.find(r.original); it != languages.end()) {
      auto& c = p.language_coverage[it->second];
      ++c.sampled;
      c.found += hit;
    }
    if (!hit) return;
    const Instant oldest = r.timemap->mementos().front().datetime;
    if (!p.age_start || oldest < *p.age_start) p.age_start = oldest;
    detail::add_growth(p.growth, *r.timemap);
  });
  if (!any) throw Error(Errc::kNoData, "no lookup results for archive " + archive.str());
  return p;
}

/// One profile per archive, in `order` (archives missing from `order` follow
/// in id order).
inline std::vector<ArchiveProfile> build_profiles(std::span<const LookupResult> results,
                                                  const LanguageLabels& languages = {},
                                                  const TldExtractor& extract = {},
                                                  std::span<const ArchiveId> order = {}) {
  std::vector<ArchiveId> ids(order.begin(), order.end());
  for (const auto& id : detail::archives_in(results))
    if (std::find(ids.begin(), ids.end(), id) == ids.end()) ids.push_back(id);
  std::vector<ArchiveProfile> profiles;
  for (const auto& id : ids) profiles.push_back(build_profile(id, results, languages, extract));
  return profiles;
}

// ---------------------------------------------------------------------------
// Profile file

inline nlohmann::json profiles_to_json(std::span<const ArchiveProfile> profiles) {
  nlohmann::json archives = nlohmann::json::array();
  auto counts = [](const auto& m) {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [k, c] : m) j[k] = {{"found", c.found}, {"sampled", c.sampled}};
    return j;
  };
  for (const auto& p : profiles) {
    nlohmann::json growth = nlohmann::json::object();
    for (const auto& [month, c] : p.growth)
      growth[month.str()] = {{"new_uris", c.new_uris}, {"mementos", c.mementos}};
    archives.push_back({{"id", p.archive.str()},
                        {"age_start", p.age_start ? nlohmann::json(format_iso8601(*p.age_start)) : nlohmann::json()},
                        {"tld_coverage", counts(p.tld_coverage)},
                        {"language_coverage", counts(p.language_coverage)},
                        {"growth", growth}});
  }
  return {{"archives", archives}};
}

inline std::string format_profiles(std::span<const ArchiveProfile> profiles) {
  return profiles_to_json(profiles).dump(2) + "\n";
}

inline std::vector<ArchiveProfile> profiles_from_json(const nlohmann::json& doc) {
  std::vector<ArchiveProfile> out;
  try {
    for (const auto& a : doc.at("archives")) {
      ArchiveProfile p;
      p.archive = ArchiveId(a.at("id").get<std::string>());
      if (a.contains("age_start") && !a["age_start"].is_null()) {
        auto t = parse_iso8601(a["age_start"].get<std::string>());
        if (!t) throw Error(Errc::kInvalidConfig, "bad age_start for " + p.archive.str());
        p.age_start = *t;
      }
      auto read_counts = [](const nlohmann::json& j, auto& into) {
        for (auto it = j.begin(); it != j.end(); ++it)
          into[it.key()] = {it->at("found").get<std::size_t>(), it->at("sampled").get<std::size_t>()};
      };
      if (a.contains("tld_coverage")) read_counts(a["tld_coverage"], p.tld_coverage);
      if (a.contains("language_coverage")) read_counts(a["language_coverage"], p.language_coverage);
      if (a.contains("growth")) {
        for (auto it = a["growth"].begin(); it != a["growth"].end(); ++it) {
          auto m = Month::parse(it.key());
          if (!m) throw Error(Errc::kInvalidConfig, "bad growth month '" + it.key() + "'");
          p.growth[*m] = {it->at("new_uris").get<std::size_t>(), it->at("mementos").get<std::size_t>()};
        }
      }
      for (const auto& [tld, c] : p.tld_coverage)
        if (c.found > c.sampled)
          throw Error(Errc::kInvalidConfig, p.archive.str() + ": found > sampled for " + tld);
      out.push_back(std::move(p));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::kInvalidConfig, std::string("profile file: ") + e.what());
  }
  return out;
}

inline std::vector<ArchiveProfile> parse_profiles(std::string_view text) {
  try {
    return profiles_from_json(nlohmann::json::parse(text));
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(Errc::kInvalidConfig, std::string("profile file: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Report matrices (TSV, first row and column are labels)

inline std::string format_ratio(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

inline std::string format_matrix(const std::vector<std::string>& rows, const std::vector<std::string>& cols,
                                 const std::function<std::optional<double>(std::size_t, std::size_t)>& cell,
                                 const std::string& corner = "") {
  std::string out = corner;
  for (const auto& c : cols) out += "\t" + c;
  out += "\n";
  for (std::size_t r = 0; r < rows.size(); ++r) {
    out += rows[r];
    for (std::size_t c = 0; c < cols.size(); ++c) {
      auto v = cell(r, c);
      out += "\t" + (v ? format_ratio(*v) : std::string("NA"));
    }
    out += "\n";
  }
  return out;
}

inline std::string format_coverage(const CoverageReport& report) {
  std::string out = "archive\tfound\tsize\tcoverage\n";
  for (const auto& [id, c] : report.archives)
    out += id.str() + "\t" + std::to_string(c.found) + "\t" + std::to_string(c.size) + "\t" +
           format_ratio(c.ratio()) + "\n";
  return out;
}

inline std::string format_cross_coverage(const CrossCoverageMatrix& m) {
  std::vector<std::string> labels;
  for (const auto& id : m.archives) labels.push_back(id.str());
  return format_matrix(labels, labels,
                       [&](std::size_t r, std::size_t c) { return m.cell(m.archives[r], m.archives[c]); },
                       "source\\target");
}

/// Heat map of per-TLD coverage rates (archive rows, TLD columns).
inline std::string format_tld_coverage(std::span<const ArchiveProfile> profiles) {
  std::set<TldLabel> tlds;
  for (const auto& p : profiles)
    for (const auto& [t, _] : p.tld_coverage) tlds.insert(t);
  std::vector<std::string> rows, cols(tlds.begin(), tlds.end());
  for (const auto& p : profiles) rows.push_back(p.archive.str());
  return format_matrix(rows, cols, [&](std::size_t r, std::size_t c) -> std::optional<double> {
    auto it = profiles[r].tld_coverage.find(cols[c]);
    if (it == profiles[r].tld_coverage.end() || it->second.sampled == 0) return std::nullopt;
    return it->second.rate();
  }, "archive\\tld");
}

inline std::string format_tld_distribution(const TldDistribution& dist) {
  std::set<TldLabel> tlds;
  for (const auto& [_, m] : dist.archives)
    for (const auto& [t, __] : m) tlds.insert(t);
  std::vector<ArchiveId> ids;
  std::vector<std::string> rows, cols(tlds.begin(), tlds.end());
  for (const auto& [id, _] : dist.archives) {
    ids.push_back(id);
    rows.push_back(id.str());
  }
  return format_matrix(rows, cols, [&](std::size_t r, std::size_t c) -> std::optional<double> {
    const auto& m = dist.archives.at(ids[r]);
    auto it = m.find(cols[c]);
    return it == m.end() ? 0.0 : it->second.ratio;
  }, "archive\\tld");
}

inline std::string format_language_distribution(const LanguageDistribution& dist) {
  std::set<std::string> langs;
  for (const auto& [_, m] : dist)
    for (const auto& [l, __] : m) langs.insert(l);
  std::vector<ArchiveId> ids;
  std::vector<std::string> rows, cols(langs.begin(), langs.end());
  for (const auto& [id, _] : dist) {
    ids.push_back(id);
    rows.push_back(id.str());
  }
  return format_matrix(rows, cols, [&](std::size_t r, std::size_t c) -> std::optional<double> {
    const auto& m = dist.at(ids[r]);
    auto it = m.find(cols[c]);
    if (it == m.end()) return std::nullopt;
    return it->second.ratio();
  }, "archive\\language");
}

inline std::string format_growth(const GrowthSeries& series) {
  std::string out = "archive\tmonth\tnew_uris\tmementos\tcumulative_uris\tcumulative_mementos\n";
  for (const auto& [id, g] : series)
    for (std::size_t i = 0; i < g.months.size(); ++i)
      out += id.str() + "\t" + g.months[i].str() + "\t" + std::to_string(g.buckets[i].new_uris) + "\t" +
             std::to_string(g.buckets[i].mementos) + "\t" + format_ratio(g.cumulative_uris[i]) + "\t" +
             format_ratio(g.cumulative_mementos[i]) + "\n";
  return out;
}

}  // namespace arcroute
