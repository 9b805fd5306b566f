#pragma once

#include <algorithm>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "arcroute/datetime.hpp"
#include "arcroute/error.hpp"
#include "arcroute/io.hpp"
#include "arcroute/memento.hpp"
#include "arcroute/random.hpp"
#include "arcroute/uri.hpp"

namespace arcroute {

struct SimRecord {
  OriginalUri uri_r;
  std::string uri_m;
  Instant datetime;

  friend bool operator==(const SimRecord&, const SimRecord&) = default;
};

/// One archive's holdings. Records keep file order; the index maps each
/// hostified original to its record positions.
class SimCorpus {
 public:
  SimCorpus(ArchiveId archive, std::vector<SimRecord> records)
      : archive_(std::move(archive)), records_(std::move(records)) {
    std::unordered_set<std::string_view> seen;
    for (std::size_t i = 0; i < records_.size(); ++i) {
      if (!seen.insert(records_[i].uri_m).second)
        throw Error(Errc::kMalformedRow, "duplicate uri_m " + records_[i].uri_m);
      index_[records_[i].uri_r].push_back(i);
    }
  }

  const ArchiveId& archive() const noexcept { return archive_; }
  const std::vector<SimRecord>& records() const noexcept { return records_; }
  std::size_t size() const noexcept { return records_.size(); }
  std::size_t host_count() const noexcept { return index_.size(); }

  bool holds(const OriginalUri& uri) const { return index_.count(uri) > 0; }

  std::vector<OriginalUri> originals() const {
    std::vector<OriginalUri> out;
    for (const auto& [uri, _] : index_) out.push_back(uri);
    return out;
  }

  std::optional<TimeMap> serve(const OriginalUri& uri) const {
    auto it = index_.find(uri);
    if (it == index_.end()) return std::nullopt;
    std::vector<MementoRecord> mementos;
    for (auto i : it->second)
      mementos.push_back({records_[i].uri_m, records_[i].datetime, archive_});
    return TimeMap(uri, std::move(mementos));
  }

 private:
  ArchiveId archive_;
  std::vector<SimRecord> records_;
  std::map<OriginalUri, std::vector<std::size_t>> index_;
};

inline std::optional<TimeMap> serve_timemap(const SimCorpus& corpus, const OriginalUri& uri) {
  return corpus.serve(uri);
}

/// Rows are `uri_r<TAB>uri_m<TAB>rfc1123-datetime`. Any bad row is fatal.
inline SimCorpus parse_corpus(std::string_view text, ArchiveId archive) {
  std::vector<SimRecord> records;
  std::unordered_set<std::string> seen;
  for_each_line(text, [&](std::size_t line_no, std::string_view line) {
    if (line.empty()) return;
    auto f = split_tabs(line);
    if (f.size() != 3) throw RowError(line_no, "expected uri_r<TAB>uri_m<TAB>datetime");
    auto when = parse_rfc1123(f[2]);
    if (!when) throw RowError(line_no, "bad datetime '" + std::string(f[2]) + "'");
    if (f[1].empty()) throw RowError(line_no, "empty uri_m");
    std::optional<OriginalUri> uri;
    try {
      uri.emplace(std::string(f[0]));
    } catch (const Error& e) {
      throw RowError(line_no, e.what());
    }
    if (hostify(*uri) != *uri) throw RowError(line_no, "uri_r not hostified: " + uri->str());
    if (!seen.insert(std::string(f[1])).second)
      throw RowError(line_no, "duplicate uri_m " + std::string(f[1]));
    records.push_back({std::move(*uri), std::string(f[1]), *when});
  });
  return SimCorpus(std::move(archive), std::move(records));
}

/// Loads `<dir>/<ID>.tsv`; the archive id defaults to the file stem.
inline SimCorpus load_corpus(const std::filesystem::path& path,
                             std::optional<ArchiveId> archive = std::nullopt) {
  if (!archive) archive = ArchiveId(path.stem().string());
  return parse_corpus(read_file(path), std::move(*archive));
}

inline std::string format_corpus(const SimCorpus& corpus) {
  std::string out;
  for (const auto& r : corpus.records()) {
    out += r.uri_r.str();
    out += '\t';
    out += r.uri_m;
    out += '\t';
    out += format_rfc1123(r.datetime);
    out += '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// Synthetic corpora

struct SynthArchive {
  ArchiveId id;
  std::string name;
  std::map<TldLabel, double> tld_affinity;
  double default_affinity = 0.0;  // for TLDs absent from tld_affinity
  Month start_month{1996, 1};
  Month end_month{2013, 6};
  double mementos_per_uri = 2.0;
  /// Last month in which the archive first captures a URI; later captures
  /// only add mementos to URIs it already holds.
  std::optional<Month> last_new_uri_month;

  double affinity(const TldLabel& tld) const {
    auto it = tld_affinity.find(tld);
    return it == tld_affinity.end() ? default_affinity : it->second;
  }
};

struct UniverseEntry {
  OriginalUri uri;
  TldLabel tld;
  std::string language;
};

struct SynthSpec {
  std::uint64_t rng_seed = 0;
  std::vector<SynthArchive> archives;
  std::vector<UniverseEntry> universe;
  /// Shared uri_m values across archives (month-granular) to exercise dedup.
  bool collision_mode = false;

  void validate() const {
    std::set<ArchiveId> ids;
    for (const auto& a : archives) {
      if (!ids.insert(a.id).second) throw Error(Errc::kInvalidConfig, "duplicate archive " + a.id.str());
      auto check = [&](double p) {
        if (!(p >= 0.0 && p <= 1.0))
          throw Error(Errc::kInvalidConfig, a.id.str() + ": affinity outside [0,1]");
      };
      check(a.default_affinity);
      for (const auto& [_, p] : a.tld_affinity) check(p);
      if (a.end_month < a.start_month)
        throw Error(Errc::kInvalidConfig, a.id.str() + ": end_month before start_month");
    }
    for (const auto& e : universe)
      if (hostify(e.uri) != e.uri) throw Error(Errc::kInvalidConfig, "universe not hostified: " + e.uri.str());
  }
};

namespace detail {

inline Instant random_instant_in(Month m, Rng& rng) {
  auto day = static_cast<int>(rng.below(static_cast<std::uint64_t>(m.days())));
  auto secs = static_cast<long long>(rng.below(86400));
  return m.first_instant() + std::chrono::days{day} + std::chrono::seconds{secs};
}

inline Month random_month_between(Month lo, Month hi, Rng& rng) {
  auto span = static_cast<std::uint64_t>(hi.index() - lo.index() + 1);
  return Month::from_index(lo.index() + static_cast<int>(rng.below(span)));
}

}  // namespace detail

/// Each archive draws from its own seed stream: inclusion of every universe
/// URI is an independent Bernoulli(affinity[tld]) trial, and included URIs
/// get 1 + Geometric mementos (mean `mementos_per_uri`).
inline std::vector<SimCorpus> generate_synthetic(const SynthSpec& spec) {
  spec.validate();
  std::vector<SimCorpus> corpora;
  for (const auto& arch : spec.archives) {
    Rng rng(keyed_seed(spec.rng_seed, "archive:" + arch.id.str()));
    const Month first_new_limit =
        arch.last_new_uri_month ? std::min(*arch.last_new_uri_month, arch.end_month) : arch.end_month;
    std::vector<SimRecord> records;
    for (const auto& entry : spec.universe) {
      if (!rng.bernoulli(arch.affinity(entry.tld))) continue;
      const auto count = rng.count_with_mean(arch.mementos_per_uri);
      const Month first = detail::random_month_between(arch.start_month, first_new_limit, rng);
      std::set<std::string> uri_ms;
      for (std::uint64_t j = 0; j < count; ++j) {
        Month month = j == 0 ? first : detail::random_month_between(first, arch.end_month, rng);
        Instant when = detail::random_instant_in(month, rng);
        std::string uri_m;
        if (spec.collision_mode) {
          when = month.first_instant();
          uri_m = "sim://shared/" + format_timestamp14(when) + "/" + entry.uri.str();
        } else {
          uri_m = "sim://" + arch.id.str() + "/" + format_timestamp14(when) + "/" + entry.uri.str();
        }
        if (uri_ms.insert(uri_m).second) records.push_back({entry.uri, std::move(uri_m), when});
      }
    }
    corpora.emplace_back(arch.id, std::move(records));
  }
  return corpora;
}

/// Default world: one generalist near-superset archive plus national and
/// thematic specialists, twelve archives in all.
inline SynthSpec default_synth_spec(std::size_t universe_size, std::uint64_t seed) {
  struct TldInfo {
    const char* tld;
    double weight;
    std::vector<std::pair<const char*, double>> languages;
  };
  const std::vector<TldInfo> tlds = {
      {"com", 0.22, {{"en", 0.7}, {"es", 0.1}, {"fr", 0.1}, {"de", 0.1}}},
      {"org", 0.10, {{"en", 0.8}, {"fr", 0.1}, {"es", 0.1}}},
      {"net", 0.06, {{"en", 0.8}, {"de", 0.2}}},
      {"edu", 0.04, {{"en", 1.0}}},
      {"gov", 0.03, {{"en", 1.0}}},
      {"uk", 0.07, {{"en", 1.0}}},
      {"ca", 0.05, {{"en", 0.6}, {"fr", 0.4}}},
      {"cat", 0.04, {{"ca", 0.9}, {"es", 0.1}}},
      {"is", 0.04, {{"is", 1.0}}},
      {"pt", 0.05, {{"pt", 1.0}}},
      {"cz", 0.05, {{"cs", 1.0}}},
      {"hr", 0.03, {{"hr", 1.0}}},
      {"tw", 0.04, {{"zh", 1.0}}},
      {"cn", 0.03, {{"zh", 1.0}}},
      {"jp", 0.04, {{"ja", 1.0}}},
      {"de", 0.05, {{"de", 1.0}}},
      {"fr", 0.04, {{"fr", 1.0}}},
      {"es", 0.02, {{"es", 0.8}, {"ca", 0.2}}},
  };

  SynthSpec spec;
  spec.rng_seed = seed;
  Rng rng(keyed_seed(seed, "universe"));
  double total_weight = 0;
  for (const auto& t : tlds) total_weight += t.weight;
  spec.universe.reserve(universe_size);
  for (std::size_t i = 0; i < universe_size; ++i) {
    double pick = rng.unit() * total_weight;
    const TldInfo* info = &tlds.back();
    for (const auto& t : tlds) {
      if (pick < t.weight) {
        info = &t;
        break;
      }
      pick -= t.weight;
    }
    double lp = rng.unit();
    const char* lang = info->languages.back().first;
    for (const auto& [code, w] : info->languages) {
      if (lp < w) {
        lang = code;
        break;
      }
      lp -= w;
    }
    char host[64];
    std::snprintf(host, sizeof host, "http://site%05zu.%s", i, info->tld);
    spec.universe.push_back({OriginalUri(host), info->tld, lang});
  }

  auto arch = [](const char* id, const char* name, double dflt, std::map<TldLabel, double> aff,
                 Month start, double mean) {
    SynthArchive a;
    a.id = ArchiveId(id);
    a.name = name;
    a.default_affinity = dflt;
    a.tld_affinity = std::move(aff);
    a.start_month = start;
    a.mementos_per_uri = mean;
    return a;
  };
  spec.archives = {
      arch("IA", "Internet Archive", 0.92, {}, {1996, 10}, 6.0),
      arch("AIT", "Archive-It", 0.25, {{"org", 0.35}, {"edu", 0.4}, {"gov", 0.3}}, {2006, 2}, 3.0),
      arch("BL", "British Library", 0.02, {{"uk", 0.55}}, {2004, 11}, 2.5),
      arch("CAN", "Library and Archives Canada", 0.0, {{"ca", 0.7}}, {2005, 12}, 2.0),
      arch("CR", "Croatian Web Archive", 0.01, {{"hr", 0.6}}, {2004, 1}, 2.0),
      arch("CZ", "Czech Web Archive", 0.04, {{"cz", 0.85}}, {2000, 9}, 3.0),
      arch("CAT", "Catalonia Web Archive", 0.02, {{"cat", 0.9}, {"es", 0.15}}, {2005, 4}, 2.5),
      arch("PO", "Portuguese Web Archive", 0.06, {{"pt", 0.85}}, {1996, 1}, 3.0),
      arch("TW", "National Taiwan University", 0.01,
           {{"tw", 0.75}, {"cn", 0.25}, {"jp", 0.2}}, {2007, 1}, 3.0),
      arch("UK", "UK Web Archive", 0.04, {{"uk", 0.75}}, {2004, 6}, 2.5),
      arch("IC", "Icelandic Web Archive", 0.04, {{"is", 0.9}}, {2004, 7}, 3.0),
      arch("LoC", "Library of Congress", 0.02, {{"gov", 0.45}, {"edu", 0.15}, {"com", 0.04}},
           {2000, 6}, 2.0),
  };
  // TW stops admitting new hosts but keeps recrawling the ones it has.
  spec.archives[8].last_new_uri_month = Month{2009, 12};
  return spec;
}

inline nlohmann::json synth_manifest(const SynthSpec& spec, const std::vector<SimCorpus>& corpora) {
  nlohmann::json archives = nlohmann::json::array();
  for (std::size_t i = 0; i < spec.archives.size(); ++i) {
    const auto& a = spec.archives[i];
    nlohmann::json aff = nlohmann::json::object();
    for (const auto& [tld, p] : a.tld_affinity) aff[tld] = p;
    nlohmann::json j = {{"id", a.id.str()},
                        {"name", a.name},
                        {"file", a.id.str() + ".tsv"},
                        {"default_affinity", a.default_affinity},
                        {"tld_affinity", aff},
                        {"start_month", a.start_month.str()},
                        {"end_month", a.end_month.str()},
                        {"mementos_per_uri", a.mementos_per_uri},
                        {"records", corpora[i].size()},
                        {"hosts", corpora[i].host_count()}};
    if (a.last_new_uri_month) j["last_new_uri_month"] = a.last_new_uri_month->str();
    archives.push_back(std::move(j));
  }
  return {{"seed", spec.rng_seed},
          {"universe_size", spec.universe.size()},
          {"collision_mode", spec.collision_mode},
          {"archives", archives}};
}

/// Fulltext-search results for each listed archive: `hits` hosts the
/// archive holds plus `misses` hosts it does not (search indexes and URI
/// lookup disagree in real archives). Paths are appended to the hosts.
inline std::string synthesize_fulltext_results(const SynthSpec& spec,
                                               const std::vector<SimCorpus>& corpora,
                                               const std::vector<ArchiveId>& sources,
                                               std::size_t hits, std::size_t misses) {
  std::string out;
  for (const auto& src : sources) {
    auto it = std::find_if(corpora.begin(), corpora.end(),
                           [&](const SimCorpus& c) { return c.archive() == src; });
    if (it == corpora.end()) throw Error(Errc::kInvalidConfig, "no corpus for " + src.str());
    Rng rng(keyed_seed(spec.rng_seed, "fulltext:" + src.str()));
    auto held = it->originals();
    std::vector<OriginalUri> not_held;
    for (const auto& e : spec.universe)
      if (!it->holds(e.uri)) not_held.push_back(e.uri);
    std::vector<OriginalUri> picked;
    for (auto i : choose_indices(held.size(), hits, rng)) picked.push_back(held[i]);
    for (auto i : choose_indices(not_held.size(), misses, rng)) picked.push_back(not_held[i]);
    rng.shuffle(picked);
    for (std::size_t i = 0; i < picked.size(); ++i) {
      out += src.str() + "\tq" + std::to_string(i / 10) + "\t" + std::to_string(i % 10 + 1) + "\t" +
             picked[i].str() + "/page" + std::to_string(i) + ".html\n";
    }
  }
  return out;
}

}  // namespace arcroute
