#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include <httplib.h>

#include "arcroute/concurrency.hpp"
#include "arcroute/error.hpp"
#include "arcroute/lookup.hpp"
#include "arcroute/memento.hpp"
#include "arcroute/random.hpp"
#include "arcroute/router.hpp"
#include "arcroute/simarchive.hpp"

namespace arcroute {

enum class Transport { kHttp, kSimCorpus };

/// Fault injection for the sim transport. Draws are keyed by
/// (seed, archive, uri), so they do not depend on request order.
struct SimFaults {
  double timeout_rate = 0.0;
  double error_rate = 0.0;
  std::uint64_t seed = 0;
};

struct ArchiveEndpoint {
  ArchiveId archive;
  std::string display_name;
  std::string timemap_uri_template;  // exactly one "{uri}"
  std::chrono::milliseconds timeout{10000};
  Transport transport = Transport::kSimCorpus;
  std::shared_ptr<const SimCorpus> corpus;  // sim transport only
  SimFaults faults;

  void validate() const {
    auto first = timemap_uri_template.find("{uri}");
    if (first == std::string::npos || timemap_uri_template.find("{uri}", first + 1) != std::string::npos)
      throw Error(Errc::kInvalidConfig, archive.str() + ": template needs exactly one {uri}");
    if (transport == Transport::kSimCorpus && !corpus)
      throw Error(Errc::kInvalidConfig, archive.str() + ": sim-corpus endpoint without a corpus");
    if (timeout.count() <= 0) throw Error(Errc::kInvalidConfig, archive.str() + ": timeout must be positive");
  }

  static ArchiveEndpoint simulated(std::shared_ptr<const SimCorpus> corpus, SimFaults faults = {}) {
    ArchiveEndpoint ep;
    ep.archive = corpus->archive();
    ep.display_name = corpus->archive().str();
    ep.timemap_uri_template = "sim://" + corpus->archive().str() + "/timemap/link/{uri}";
    ep.corpus = std::move(corpus);
    ep.faults = faults;
    return ep;
  }
};

/// RFC 3986 percent-encoding of everything outside the unreserved set.
inline std::string percent_encode(std::string_view s) {
  static const char* hex = "0123456789ABCDEF";
  std::string out;
  for (unsigned char c : s) {
    if (std::isalnum(c) || c == '-' || c == '.' || c == '_' || c == '~') {
      out.push_back(static_cast<char>(c));
    } else {
      out.push_back('%');
      out.push_back(hex[c >> 4]);
      out.push_back(hex[c & 15]);
    }
  }
  return out;
}

inline std::string expand_template(const std::string& tmpl, const OriginalUri& uri) {
  auto pos = tmpl.find("{uri}");
  return tmpl.substr(0, pos) + percent_encode(uri.str()) + tmpl.substr(pos + 5);
}

namespace detail {

inline LookupResult http_fetch(const ArchiveEndpoint& ep, const OriginalUri& uri) {
  LookupResult r{ep.archive, uri, std::nullopt, std::chrono::time_point_cast<std::chrono::seconds>(std::chrono::system_clock::now()),
                 Outcome::kError, {}};
  const std::string url = expand_template(ep.timemap_uri_template, uri);
  auto parts = split_uri(url);
  if (!parts || parts->host.empty()) {
    r.detail = "bad endpoint URL " + url;
    return r;
  }
  std::string base = std::string(parts->scheme) + "://" + std::string(parts->host);
  if (!parts->port.empty()) base += ":" + std::string(parts->port);
  std::string path = parts->rest.empty() ? "/" : std::string(parts->rest);

  httplib::Client client(base);
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(ep.timeout);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(ep.timeout - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());
  client.set_write_timeout(secs.count(), usecs.count());
  client.set_follow_location(true);

  const auto start = std::chrono::steady_clock::now();
  auto res = client.Get(path, {{"Accept", "application/link-format"}});
  if (!res) {
    const auto err = res.error();
    const bool slow = std::chrono::steady_clock::now() - start >= ep.timeout;
    r.outcome = err == httplib::Error::ConnectionTimeout || (err == httplib::Error::Read && slow)
                    ? Outcome::kTimeout
                    : Outcome::kError;
    r.detail = httplib::to_string(err);
    return r;
  }
  if (res->status == 404) {
    r.outcome = Outcome::kNotFound;
    return r;
  }
  if (res->status != 200) {
    r.detail = "HTTP " + std::to_string(res->status);
    return r;
  }
  try {
    r.timemap = parse_link_format(res->body, ep.archive);
    r.outcome = Outcome::kOk;
  } catch (const Error& e) {
    r.detail = e.what();
  }
  return r;
}

inline LookupResult sim_fetch(const ArchiveEndpoint& ep, const OriginalUri& uri) {
  LookupResult r{ep.archive, uri, std::nullopt, Instant{}, Outcome::kNotFound, {}};
  if (ep.faults.timeout_rate > 0 || ep.faults.error_rate > 0) {
    Rng draw(keyed_seed(ep.faults.seed, ep.archive.str() + "\n" + uri.str()));
    const double u = draw.unit();
    if (u < ep.faults.timeout_rate) {
      r.outcome = Outcome::kTimeout;
      r.detail = "injected timeout";
      return r;
    }
    if (u < ep.faults.timeout_rate + ep.faults.error_rate) {
      r.outcome = Outcome::kError;
      r.detail = "injected error";
      return r;
    }
  }
  if (auto tm = ep.corpus->serve(uri)) {
    r.timemap = std::move(*tm);
    r.outcome = Outcome::kOk;
  }
  return r;
}

}  // namespace detail

/// Never throws for transport problems; they become the result's outcome.
inline LookupResult fetch_timemap(const ArchiveEndpoint& ep, const OriginalUri& uri) {
  return ep.transport == Transport::kHttp ? detail::http_fetch(ep, uri) : detail::sim_fetch(ep, uri);
}

/// Fans out one lookup per endpoint, at most `concurrency` at a time.
/// Results come back in endpoint order.
inline std::vector<LookupResult> fetch_all(std::span<const ArchiveEndpoint> endpoints, const OriginalUri& uri,
                                           std::size_t concurrency = 8) {
  std::vector<std::optional<LookupResult>> slots(endpoints.size());
  parallel_for(endpoints.size(), concurrency,
               [&](std::size_t i) { slots[i] = fetch_timemap(endpoints[i], uri); });
  std::vector<LookupResult> out;
  out.reserve(slots.size());
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

/// Exact routed/full memento counts.
struct Success {
  std::size_t routed = 0;
  std::size_t full = 0;

  /// Empty full TimeMap: success is 1 by convention.
  bool vacuous() const { return full == 0; }
  bool complete() const { return routed == full; }
  double value() const { return vacuous() ? 1.0 : static_cast<double>(routed) / static_cast<double>(full); }

  /// Two decimals, half-up, computed on the exact fraction.
  std::string display() const {
    if (vacuous()) return "1.00";
    const auto hundredths = (200 * static_cast<unsigned __int128>(routed) + full) / (2 * static_cast<unsigned __int128>(full));
    const auto h = static_cast<unsigned long long>(hundredths);
    char buf[32];
    std::snprintf(buf, sizeof buf, "%llu.%02llu", h / 100, h % 100);
    return buf;
  }
};

struct AggregationResult {
  OriginalUri uri;
  TimeMap full;
  TimeMap routed;
  std::map<ArchiveId, Outcome> outcomes;
  Success success;
  bool usable = true;  // false when every archive failed

  bool any_failure() const {
    return std::any_of(outcomes.begin(), outcomes.end(), [](auto& kv) {
      return kv.second == Outcome::kTimeout || kv.second == Outcome::kError;
    });
  }
};

/// Builds the full and routed TimeMaps from already-fetched lookups. Maps are
/// merged in archive-id order, so the result does not depend on the order
/// responses arrived in.
inline AggregationResult aggregate_lookups(const OriginalUri& uri, std::span<const LookupResult> lookups,
                                           std::span<const ArchiveId> chosen) {
  std::vector<const LookupResult*> ordered;
  for (const auto& l : lookups) ordered.push_back(&l);
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const LookupResult* a, const LookupResult* b) { return a->archive < b->archive; });

  AggregationResult result{uri, TimeMap(uri), TimeMap(uri), {}, {}, true};
  std::vector<TimeMap> all, picked;
  bool any_answer = false;
  for (const auto* l : ordered) {
    if (l->original != uri)
      throw Error(Errc::kMixedOriginals, l->original.str() + " vs " + uri.str());
    result.outcomes.emplace(l->archive, l->outcome);
    any_answer |= !l->failed();
    if (l->outcome != Outcome::kOk || !l->timemap) continue;
    all.push_back(*l->timemap);
    if (std::find(chosen.begin(), chosen.end(), l->archive) != chosen.end()) picked.push_back(*l->timemap);
  }
  result.usable = any_answer;
  if (!all.empty()) result.full = merge_timemaps(all);
  if (!picked.empty()) result.routed = merge_timemaps(picked);
  result.success = {result.routed.size(), result.full.size()};
  return result;
}

/// Fetches from every endpoint, then aggregates over all of them (full) and
/// over the ranking's chosen archives (routed).
inline AggregationResult aggregate(const OriginalUri& uri, std::span<const ArchiveEndpoint> endpoints,
                                   const ArchiveRanking& ranking, std::size_t concurrency = 8) {
  for (const auto& id : ranking.chosen)
    if (std::none_of(endpoints.begin(), endpoints.end(), [&](auto& ep) { return ep.archive == id; }))
      throw Error(Errc::kInvalidConfig, "chosen archive " + id.str() + " has no endpoint");
  auto lookups = fetch_all(endpoints, uri, concurrency);
  return aggregate_lookups(uri, lookups, ranking.chosen);
}

}  // namespace arcroute
