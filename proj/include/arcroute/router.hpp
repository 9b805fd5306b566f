#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "arcroute/error.hpp"
#include "arcroute/memento.hpp"
#include "arcroute/profiler.hpp"
#include "arcroute/uri.hpp"

namespace arcroute {

struct RoutingPolicy {
  std::size_t k = 3;
  std::set<ArchiveId> exclude;
  /// Order used when the TLD gives no signal. Archives not listed follow in
  /// global-coverage order; empty means global-coverage order throughout.
  std::vector<ArchiveId> fallback_order;
};

struct ScoredArchive {
  ArchiveId archive;
  double score = 0.0;
};

struct ArchiveRanking {
  OriginalUri uri;
  std::optional<TldLabel> tld;  // absent when the host has no TLD
  std::vector<ScoredArchive> ranked;  // excluded archives are not listed
  std::vector<ArchiveId> chosen;      // first k of `ranked`
  bool fallback = false;              // no profile observed this TLD
};

namespace detail {

// a/b > c/d for count ratios without rounding; 0/0 counts as 0.
inline bool ratio_greater(const FoundSampled& x, const FoundSampled& y) {
  const auto lhs = static_cast<unsigned __int128>(x.found) * (y.sampled ? y.sampled : 1);
  const auto rhs = static_cast<unsigned __int128>(y.found) * (x.sampled ? x.sampled : 1);
  const bool x_zero = x.sampled == 0 || x.found == 0;
  const bool y_zero = y.sampled == 0 || y.found == 0;
  if (x_zero || y_zero) return !x_zero && y_zero;
  return lhs > rhs;
}

inline FoundSampled tld_counts(const ArchiveProfile& p, const std::optional<TldLabel>& tld) {
  if (!tld) return {};
  auto it = p.tld_coverage.find(*tld);
  return it == p.tld_coverage.end() ? FoundSampled{} : it->second;
}

}  // namespace detail

/// Scores each archive by its coverage rate on the URI's TLD, breaking ties
/// by global coverage rate then archive id. Rates are compared as exact
/// fractions.
inline ArchiveRanking rank_archives(const OriginalUri& uri, std::span<const ArchiveProfile> profiles,
                                    const RoutingPolicy& policy, const TldExtractor& extract = {}) {
  std::vector<const ArchiveProfile*> pool;
  std::set<ArchiveId> ids;
  for (const auto& p : profiles) {
    if (!ids.insert(p.archive).second)
      throw Error(Errc::kInvalidPolicy, "duplicate profile for " + p.archive.str());
    if (!policy.exclude.count(p.archive)) pool.push_back(&p);
  }
  if (policy.k < 1 || policy.k > pool.size())
    throw Error(Errc::kInvalidPolicy, "k=" + std::to_string(policy.k) + " but " +
                                          std::to_string(pool.size()) + " archives are eligible");

  ArchiveRanking ranking{uri, std::nullopt, {}, {}, false};
  try {
    ranking.tld = extract(uri);
  } catch (const Error& e) {
    if (e.code() != Errc::kNoTld) throw;
  }

  auto by_global = [](const ArchiveProfile* a, const ArchiveProfile* b) {
    auto ga = a->global(), gb = b->global();
    if (detail::ratio_greater(ga, gb)) return true;
    if (detail::ratio_greater(gb, ga)) return false;
    return a->archive < b->archive;
  };

  bool any_signal = false;
  for (const auto* p : pool) {
    auto c = detail::tld_counts(*p, ranking.tld);
    any_signal |= c.sampled > 0 && c.found > 0;
  }

  if (any_signal) {
    std::sort(pool.begin(), pool.end(), [&](const ArchiveProfile* a, const ArchiveProfile* b) {
      auto ca = detail::tld_counts(*a, ranking.tld), cb = detail::tld_counts(*b, ranking.tld);
      if (detail::ratio_greater(ca, cb)) return true;
      if (detail::ratio_greater(cb, ca)) return false;
      return by_global(a, b);
    });
  } else {
    ranking.fallback = true;
    auto position = [&](const ArchiveId& id) {
      return std::find(policy.fallback_order.begin(), policy.fallback_order.end(), id) -
             policy.fallback_order.begin();
    };
    std::sort(pool.begin(), pool.end(), [&](const ArchiveProfile* a, const ArchiveProfile* b) {
      auto pa = position(a->archive), pb = position(b->archive);
      if (pa != pb) return pa < pb;
      return by_global(a, b);
    });
  }

  for (const auto* p : pool) ranking.ranked.push_back({p->archive, detail::tld_counts(*p, ranking.tld).rate()});
  for (std::size_t i = 0; i < policy.k; ++i) ranking.chosen.push_back(ranking.ranked[i].archive);
  return ranking;
}

/// `uri<TAB>tld<TAB>rank<TAB>archive<TAB>score`, one row per listed archive
/// (all ranked archives, or only the chosen prefix).
inline std::string format_ranking(const ArchiveRanking& r, bool chosen_only = true) {
  std::string out;
  const auto n = chosen_only ? r.chosen.size() : r.ranked.size();
  for (std::size_t i = 0; i < n; ++i)
    out += r.uri.str() + "\t" + r.tld.value_or("") + "\t" + std::to_string(i + 1) + "\t" +
           r.ranked[i].archive.str() + "\t" + format_ratio(r.ranked[i].score) + "\n";
  return out;
}

}  // namespace arcroute
