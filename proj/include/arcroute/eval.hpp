#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "arcroute/aggregator.hpp"
#include "arcroute/concurrency.hpp"
#include "arcroute/error.hpp"
#include "arcroute/lookup.hpp"
#include "arcroute/profiler.hpp"
#include "arcroute/random.hpp"
#include "arcroute/router.hpp"
#include "arcroute/sampler.hpp"

namespace arcroute {

struct FoldAssignment {
  std::uint64_t rng_seed = 0;
  std::vector<std::vector<OriginalUri>> folds;

  std::size_t fold_of(const OriginalUri& uri) const {
    for (std::size_t f = 0; f < folds.size(); ++f)
      if (std::find(folds[f].begin(), folds[f].end(), uri) != folds[f].end()) return f;
    return std::numeric_limits<std::size_t>::max();
  }
};

/// Seeded shuffle, then round-robin into `fold_count` folds.
inline FoldAssignment ten_fold_split(const UriSample& sample, std::uint64_t seed,
                                     std::size_t fold_count = 10) {
  if (sample.size() < fold_count)
    throw Error(Errc::kSampleTooSmall, std::to_string(sample.size()) + " URIs for " +
                                           std::to_string(fold_count) + " folds");
  std::vector<OriginalUri> uris;
  for (const auto& e : sample.entries()) uris.push_back(e.uri);
  Rng rng(keyed_seed(seed, "folds"));
  rng.shuffle(uris);
  FoldAssignment a{seed, std::vector<std::vector<OriginalUri>>(fold_count)};
  for (std::size_t i = 0; i < uris.size(); ++i) a.folds[i % fold_count].push_back(uris[i]);
  return a;
}

/// Every (archive, uri) lookup for a sample, fetched once and reused by
/// every fold and policy.
struct LookupTable {
  std::vector<ArchiveId> archives;
  std::map<OriginalUri, std::vector<LookupResult>> by_uri;  // endpoint order

  std::vector<LookupResult> flatten() const {
    std::vector<LookupResult> out;
    for (const auto& [_, v] : by_uri) out.insert(out.end(), v.begin(), v.end());
    return out;
  }

  std::size_t failures() const {
    std::size_t n = 0;
    for (const auto& [_, v] : by_uri)
      for (const auto& r : v) n += r.failed();
    return n;
  }
};

/// `jobs` bounds URIs in flight; `concurrency` bounds archives per URI.
inline LookupTable collect_lookups(const UriSample& sample, std::span<const ArchiveEndpoint> endpoints,
                                   std::size_t jobs = 1, std::size_t concurrency = 1) {
  LookupTable table;
  std::set<ArchiveId> ids;
  for (const auto& ep : endpoints) {
    ep.validate();
    if (!ids.insert(ep.archive).second) throw Error(Errc::kInvalidConfig, "duplicate endpoint " + ep.archive.str());
    table.archives.push_back(ep.archive);
  }
  std::vector<std::vector<LookupResult>> slots(sample.size());
  parallel_for(sample.size(), jobs, [&](std::size_t i) {
    slots[i] = fetch_all(endpoints, sample.entries()[i].uri, concurrency);
  });
  for (std::size_t i = 0; i < sample.size(); ++i) table.by_uri.emplace(sample.entries()[i].uri, std::move(slots[i]));
  return table;
}

/// Profiles from every fold except `held_out`; the held-out URIs' own
/// lookups never reach them.
inline std::vector<ArchiveProfile> fold_profiles(const LookupTable& table, const FoldAssignment& folds,
                                                 std::size_t held_out, const LanguageLabels& languages = {},
                                                 const TldExtractor& extract = {}) {
  std::vector<LookupResult> training;
  for (std::size_t f = 0; f < folds.folds.size(); ++f) {
    if (f == held_out) continue;
    for (const auto& uri : folds.folds[f]) {
      const auto& v = table.by_uri.at(uri);
      training.insert(training.end(), v.begin(), v.end());
    }
  }
  std::vector<ArchiveProfile> profiles;
  for (const auto& id : table.archives) {
    try {
      profiles.push_back(build_profile(id, training, languages, extract));
    } catch (const Error& e) {
      if (e.code() != Errc::kNoData) throw;
      profiles.push_back({id, std::nullopt, {}, {}, {}});
    }
  }
  return profiles;
}

enum class PolicyKind { kProfile, kRandom };

inline std::string_view policy_kind_name(PolicyKind p) { return p == PolicyKind::kProfile ? "profile" : "random"; }

struct FoldStats {
  std::size_t fold = 0;
  std::size_t evaluated = 0;  // usable URIs
  double mean_success = 0.0;
  double complete_fraction = 0.0;
  std::size_t vacuous = 0;
  std::size_t unusable = 0;  // every archive failed; excluded from the means
};

struct UriScore {
  OriginalUri uri;
  std::size_t fold = 0;
  Success success;
  std::vector<ArchiveId> chosen;
  bool fallback = false;
  bool usable = true;
};

struct EvaluationReport {
  PolicyKind policy = PolicyKind::kProfile;
  std::size_t k = 3;
  std::set<ArchiveId> excluded;
  std::vector<FoldStats> folds;
  FoldStats overall;
  std::vector<double> histogram;  // fraction of usable URIs per equal-width success bin
  std::vector<UriScore> uris;     // in fold order, then fold-internal order
};

struct EvaluationOptions {
  std::vector<std::size_t> ks{3, 6, 9};
  std::set<ArchiveId> exclude;  // when non-empty, an ablation world without these archives is also run
  std::uint64_t seed = 0;
  bool random_baseline = true;
  std::size_t histogram_bins = 20;
  std::size_t jobs = 1;  // folds evaluated concurrently
  TldExtractor extract;
};

struct EvaluationSuite {
  std::uint64_t seed = 0;
  std::string sample;
  std::vector<ArchiveId> archives;
  FoldAssignment folds;
  std::vector<EvaluationReport> reports;
  std::size_t lookup_failures = 0;
};

namespace detail {

inline FoldStats summarize(std::size_t fold, std::span<const UriScore> scores) {
  FoldStats s{fold, 0, 0.0, 0.0, 0, 0};
  double sum = 0.0;
  std::size_t complete = 0;
  for (const auto& u : scores) {
    if (!u.usable) {
      ++s.unusable;
      continue;
    }
    ++s.evaluated;
    sum += u.success.value();
    complete += u.success.complete();
    s.vacuous += u.success.vacuous();
  }
  if (s.evaluated) {
    s.mean_success = sum / static_cast<double>(s.evaluated);
    s.complete_fraction = static_cast<double>(complete) / static_cast<double>(s.evaluated);
  }
  return s;
}

inline std::size_t histogram_bin(const Success& s, std::size_t bins) {
  if (s.vacuous() || s.complete()) return bins - 1;
  return static_cast<std::size_t>((static_cast<unsigned __int128>(s.routed) * bins) / s.full);
}

}  // namespace detail

/// Cross-validated routing evaluation. For each world (all archives, and
/// without `exclude` when given), each k and each policy, every URI is
/// routed using profiles trained on the other folds.
inline EvaluationSuite run_evaluation(const UriSample& sample, const LookupTable& table,
                                      const EvaluationOptions& options) {
  if (options.ks.empty()) throw Error(Errc::kInvalidPolicy, "no k values");
  if (options.histogram_bins < 1) throw Error(Errc::kInvalidPolicy, "histogram needs at least one bin");
  for (const auto& id : options.exclude)
    if (std::find(table.archives.begin(), table.archives.end(), id) == table.archives.end())
      throw Error(Errc::kInvalidPolicy, "excluded archive " + id.str() + " is not configured");
  for (const auto& e : sample.entries())
    if (!table.by_uri.count(e.uri)) throw Error(Errc::kSampleMismatch, "no lookups for " + e.uri.str());

  std::vector<std::set<ArchiveId>> worlds{{}};
  if (!options.exclude.empty()) worlds.push_back(options.exclude);
  for (const auto& world : worlds)
    for (auto k : options.ks)
      if (k < 1 || k + world.size() > table.archives.size())
        throw Error(Errc::kInvalidPolicy, "k=" + std::to_string(k) + " exceeds eligible archives");

  EvaluationSuite suite;
  suite.seed = options.seed;
  suite.sample = sample.name();
  suite.archives = table.archives;
  suite.folds = ten_fold_split(sample, options.seed);
  suite.lookup_failures = table.failures();
  const auto labels = language_labels(sample);

  struct Run {
    PolicyKind policy;
    std::size_t k;
    const std::set<ArchiveId>* world;
  };
  std::vector<Run> runs;
  for (const auto& world : worlds)
    for (auto policy : {PolicyKind::kProfile, PolicyKind::kRandom}) {
      if (policy == PolicyKind::kRandom && !options.random_baseline) continue;
      for (auto k : options.ks) runs.push_back({policy, k, &world});
    }

  const std::size_t fold_count = suite.folds.folds.size();
  // scores[fold][run] -> per-URI scores
  std::vector<std::vector<std::vector<UriScore>>> scores(fold_count, std::vector<std::vector<UriScore>>(runs.size()));
  parallel_for(fold_count, options.jobs, [&](std::size_t f) {
    const auto profiles = fold_profiles(table, suite.folds, f, labels, options.extract);
    for (const auto& uri : suite.folds.folds[f]) {
      const auto& all = table.by_uri.at(uri);
      for (std::size_t r = 0; r < runs.size(); ++r) {
        const auto& run = runs[r];
        std::vector<LookupResult> visible;
        std::vector<ArchiveId> eligible;
        for (const auto& l : all)
          if (!run.world->count(l.archive)) visible.push_back(l);
        for (const auto& id : table.archives)
          if (!run.world->count(id)) eligible.push_back(id);

        UriScore score{uri, f, {}, {}, false, true};
        if (run.policy == PolicyKind::kProfile) {
          RoutingPolicy policy{run.k, *run.world, {}};
          auto ranking = rank_archives(uri, profiles, policy, options.extract);
          score.chosen = ranking.chosen;
          score.fallback = ranking.fallback;
        } else {
          Rng rng(keyed_seed(options.seed, "random:" + std::to_string(run.k) + ":" + uri.str()));
          for (auto i : choose_indices(eligible.size(), run.k, rng)) score.chosen.push_back(eligible[i]);
        }
        auto agg = aggregate_lookups(uri, visible, score.chosen);
        score.success = agg.success;
        score.usable = agg.usable;
        scores[f][r].push_back(std::move(score));
      }
    }
  });

  for (std::size_t r = 0; r < runs.size(); ++r) {
    EvaluationReport report;
    report.policy = runs[r].policy;
    report.k = runs[r].k;
    report.excluded = *runs[r].world;
    report.histogram.assign(options.histogram_bins, 0.0);
    for (std::size_t f = 0; f < fold_count; ++f) {
      report.folds.push_back(detail::summarize(f, scores[f][r]));
      report.uris.insert(report.uris.end(), scores[f][r].begin(), scores[f][r].end());
    }
    report.overall = detail::summarize(std::numeric_limits<std::size_t>::max(), report.uris);
    for (const auto& u : report.uris)
      if (u.usable) report.histogram[detail::histogram_bin(u.success, options.histogram_bins)] += 1.0;
    if (report.overall.evaluated)
      for (auto& h : report.histogram) h /= static_cast<double>(report.overall.evaluated);
    suite.reports.push_back(std::move(report));
  }
  return suite;
}

// ---------------------------------------------------------------------------
// Report files

inline std::string excluded_label(const std::set<ArchiveId>& excluded) {
  if (excluded.empty()) return "-";
  std::string s;
  for (const auto& id : excluded) s += (s.empty() ? "" : ",") + id.str();
  return s;
}

inline nlohmann::json fold_stats_json(const FoldStats& s) {
  return {{"evaluated", s.evaluated},     {"mean_success", s.mean_success},
          {"complete_fraction", s.complete_fraction}, {"vacuous", s.vacuous},
          {"unusable", s.unusable}};
}

/// Full JSON report for one world (the set of excluded archives).
inline nlohmann::json report_json(const EvaluationSuite& suite, const std::set<ArchiveId>& world) {
  nlohmann::json archives = nlohmann::json::array(), fold_sizes = nlohmann::json::array();
  for (const auto& id : suite.archives)
    if (!world.count(id)) archives.push_back(id.str());
  for (const auto& f : suite.folds.folds) fold_sizes.push_back(f.size());

  nlohmann::json runs = nlohmann::json::array();
  for (const auto& r : suite.reports) {
    if (r.excluded != world) continue;
    nlohmann::json folds = nlohmann::json::array();
    for (const auto& f : r.folds) {
      auto j = fold_stats_json(f);
      j["fold"] = f.fold;
      folds.push_back(std::move(j));
    }
    nlohmann::json uris = nlohmann::json::array();
    for (const auto& u : r.uris) {
      nlohmann::json chosen = nlohmann::json::array();
      for (const auto& c : u.chosen) chosen.push_back(c.str());
      uris.push_back({{"uri", u.uri.str()},
                      {"fold", u.fold},
                      {"routed", u.success.routed},
                      {"full", u.success.full},
                      {"success", u.success.value()},
                      {"vacuous", u.success.vacuous()},
                      {"usable", u.usable},
                      {"fallback", u.fallback},
                      {"chosen", chosen}});
    }
    nlohmann::json excluded = nlohmann::json::array();
    for (const auto& id : r.excluded) excluded.push_back(id.str());
    runs.push_back({{"policy", policy_kind_name(r.policy)},
                    {"k", r.k},
                    {"excluded", excluded},
                    {"folds", folds},
                    {"aggregate", fold_stats_json(r.overall)},
                    {"histogram", r.histogram},
                    {"uris", uris}});
  }
  return {{"seed", suite.seed},
          {"sample", suite.sample},
          {"archives", archives},
          {"fold_sizes", fold_sizes},
          {"lookup_failures", suite.lookup_failures},
          {"conventions",
           {{"score", "per-TLD coverage rate found/sampled from training folds"},
            {"ties", "global coverage rate descending, then archive id ascending"},
            {"unknown_tld", "global-coverage order, flagged fallback"},
            {"success", "routed/full memento counts after uri_m dedup"},
            {"vacuous", "empty full TimeMap counts as success 1 and complete"},
            {"unusable", "URIs where every archive failed are excluded from means"},
            {"exclusion", "excluded archives are removed from routing and from the full TimeMap"}}},
          {"runs", runs}};
}

inline std::string format_report(const EvaluationSuite& suite, const std::set<ArchiveId>& world) {
  return report_json(suite, world).dump(2) + "\n";
}

/// `k<TAB>excluded<TAB>fold<TAB>mean_success<TAB>complete_fraction` for one
/// policy; fold "all" carries the overall figures.
inline std::string format_summary(const EvaluationSuite& suite, PolicyKind policy = PolicyKind::kProfile) {
  std::string out = "k\texcluded\tfold\tmean_success\tcomplete_fraction\n";
  for (const auto& r : suite.reports) {
    if (r.policy != policy) continue;
    auto row = [&](const std::string& fold, const FoldStats& s) {
      out += std::to_string(r.k) + "\t" + excluded_label(r.excluded) + "\t" + fold + "\t" +
             format_ratio(s.mean_success) + "\t" + format_ratio(s.complete_fraction) + "\n";
    };
    for (const auto& f : r.folds) row(std::to_string(f.fold), f);
    row("all", r.overall);
  }
  return out;
}

/// One column per run, one row per success bin.
inline std::string format_histogram(const EvaluationSuite& suite) {
  if (suite.reports.empty()) return "bin_low\tbin_high\n";
  const auto bins = suite.reports.front().histogram.size();
  std::string out = "bin_low\tbin_high";
  for (const auto& r : suite.reports) {
    out += "\t" + std::string(policy_kind_name(r.policy)) + "_k" + std::to_string(r.k);
    if (!r.excluded.empty()) out += "_excl_" + excluded_label(r.excluded);
  }
  out += "\n";
  for (std::size_t b = 0; b < bins; ++b) {
    out += format_ratio(static_cast<double>(b) / static_cast<double>(bins)) + "\t" +
           format_ratio(static_cast<double>(b + 1) / static_cast<double>(bins));
    for (const auto& r : suite.reports) out += "\t" + format_ratio(r.histogram[b]);
    out += "\n";
  }
  return out;
}

}  // namespace arcroute
