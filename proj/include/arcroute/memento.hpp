#pragma once

#include <algorithm>
#include <cctype>
#include <compare>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <unordered_set>
#include <utility>
#include <vector>

#include "arcroute/datetime.hpp"
#include "arcroute/error.hpp"

namespace arcroute {

namespace detail {

inline std::string to_lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

inline bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() &&
         std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) ==
                  std::tolower(static_cast<unsigned char>(y));
         });
}

inline std::string_view trim(std::string_view s) {
  const char* ws = " \t\r\n";
  auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

/// Components of an absolute URI. `host` is empty when there is no authority.
struct UriParts {
  std::string_view scheme;
  std::string_view host;
  std::string_view port;
  std::string_view rest;  // path + query + fragment
};

inline std::optional<UriParts> split_uri(std::string_view uri) {
  auto colon = uri.find(':');
  if (colon == 0 || colon == std::string_view::npos) return std::nullopt;
  auto scheme = uri.substr(0, colon);
  if (!std::isalpha(static_cast<unsigned char>(scheme[0]))) return std::nullopt;
  for (char c : scheme)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '+' && c != '-' && c != '.')
      return std::nullopt;
  UriParts parts{scheme, {}, {}, uri.substr(colon + 1)};
  if (parts.rest.substr(0, 2) != "//") return parts;
  auto after = parts.rest.substr(2);
  auto end = after.find_first_of("/?#");
  auto authority = after.substr(0, end);
  parts.rest = end == std::string_view::npos ? std::string_view{} : after.substr(end);
  if (auto at = authority.rfind('@'); at != std::string_view::npos)
    authority = authority.substr(at + 1);
  if (!authority.empty() && authority.front() == '[') {
    auto close = authority.find(']');
    if (close == std::string_view::npos) return std::nullopt;
    parts.host = authority.substr(0, close + 1);
    auto tail = authority.substr(close + 1);
    if (!tail.empty() && tail.front() == ':') parts.port = tail.substr(1);
  } else if (auto pc = authority.rfind(':'); pc != std::string_view::npos) {
    parts.host = authority.substr(0, pc);
    parts.port = authority.substr(pc + 1);
  } else {
    parts.host = authority;
  }
  return parts;
}

}  // namespace detail

/// Short archive token such as "IA" or "PO". Display names live in the
/// endpoint configuration, not here.
class ArchiveId {
 public:
  ArchiveId() = default;
  explicit ArchiveId(std::string id) : id_(std::move(id)) {
    if (id_.empty() || !std::all_of(id_.begin(), id_.end(), [](char c) {
          return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
        }))
      throw Error(Errc::kInvalidArchiveId, "'" + id_ + "'");
  }

  const std::string& str() const noexcept { return id_; }
  bool empty() const noexcept { return id_.empty(); }

  friend auto operator<=>(const ArchiveId&, const ArchiveId&) = default;

 private:
  std::string id_;
};

/// Absolute URI with a hostname, e.g. "http://example.org".
class OriginalUri {
 public:
  explicit OriginalUri(std::string value) : value_(std::move(value)) {
    auto parts = detail::split_uri(value_);
    if (!parts || parts->host.empty())
      throw Error(Errc::kInvalidUri, "not an absolute URI with a host: '" + value_ + "'");
  }

  const std::string& str() const noexcept { return value_; }

  std::string_view host() const { return detail::split_uri(value_)->host; }

  friend auto operator<=>(const OriginalUri&, const OriginalUri&) = default;

 private:
  std::string value_;
};

/// Comparison key for originals: scheme and host lowercased, default port
/// and a bare "/" path dropped.
inline std::string normalize_original(const OriginalUri& uri) {
  auto parts = *detail::split_uri(uri.str());
  auto scheme = detail::to_lower(parts.scheme);
  std::string out = scheme + "://" + detail::to_lower(parts.host);
  bool default_port = parts.port.empty() || (scheme == "http" && parts.port == "80") ||
                      (scheme == "https" && parts.port == "443");
  if (!default_port) out += ":" + std::string(parts.port);
  if (parts.rest != "/") out += parts.rest;
  return out;
}

struct MementoRecord {
  std::string uri_m;
  Instant datetime;
  ArchiveId archive;  // empty when the source did not attribute it

  friend bool operator==(const MementoRecord&, const MementoRecord&) = default;
};

/// Mementos of one original resource, sorted by (datetime, uri_m) with
/// unique uri_m values.
class TimeMap {
 public:
  explicit TimeMap(OriginalUri original, std::vector<MementoRecord> mementos = {})
      : original_(std::move(original)), mementos_(std::move(mementos)) {
    normalize();
  }

  const OriginalUri& original() const noexcept { return original_; }
  const std::vector<MementoRecord>& mementos() const noexcept { return mementos_; }
  std::size_t size() const noexcept { return mementos_.size(); }
  bool empty() const noexcept { return mementos_.empty(); }

  friend bool operator==(const TimeMap&, const TimeMap&) = default;

 private:
  // First occurrence of a uri_m wins, then sort.
  void normalize() {
    std::unordered_set<std::string_view> seen;
    std::vector<bool> keep(mementos_.size());
    for (std::size_t i = 0; i < mementos_.size(); ++i) {
      if (mementos_[i].uri_m.empty()) throw Error(Errc::kMalformedLink, "empty memento URI");
      keep[i] = seen.insert(mementos_[i].uri_m).second;
    }
    seen.clear();
    std::vector<MementoRecord> unique;
    unique.reserve(mementos_.size());
    for (std::size_t i = 0; i < mementos_.size(); ++i)
      if (keep[i]) unique.push_back(std::move(mementos_[i]));
    std::sort(unique.begin(), unique.end(), [](const MementoRecord& a, const MementoRecord& b) {
      return std::tie(a.datetime, a.uri_m) < std::tie(b.datetime, b.uri_m);
    });
    mementos_ = std::move(unique);
  }

  OriginalUri original_;
  std::vector<MementoRecord> mementos_;
};

namespace detail {

struct Link {
  std::string target;
  std::vector<std::pair<std::string, std::string>> params;  // names lowercased

  const std::string* param(std::string_view name) const {
    for (auto& [k, v] : params)
      if (k == name) return &v;
    return nullptr;
  }
};

class LinkReader {
 public:
  explicit LinkReader(std::string_view body) : s_(body) {}

  // Returns false at end of input.
  bool next(Link& link) {
    skip_ws();
    if (pos_ == s_.size()) return false;
    link = {};
    if (s_[pos_] != '<') fail("expected '<'");
    auto close = s_.find('>', pos_);
    if (close == std::string_view::npos) fail("unterminated '<'");
    link.target = std::string(trim(s_.substr(pos_ + 1, close - pos_ - 1)));
    if (link.target.empty()) fail("empty link target");
    pos_ = close + 1;
    for (;;) {
      skip_ws();
      if (pos_ == s_.size()) return true;
      char c = s_[pos_];
      if (c == ',') {
        ++pos_;
        skip_ws();
        if (pos_ == s_.size()) fail("trailing ','");
        return true;
      }
      if (c != ';') fail(std::string("unexpected '") + c + "'");
      ++pos_;
      skip_ws();
      link.params.push_back(read_param());
    }
  }

 private:
  void skip_ws() {
    while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t' || s_[pos_] == '\r' ||
                                s_[pos_] == '\n'))
      ++pos_;
  }

  static bool token_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || std::string_view("!#$&+-.^_`|~*%'").find(c) != std::string_view::npos;
  }

  std::pair<std::string, std::string> read_param() {
    auto start = pos_;
    while (pos_ < s_.size() && token_char(s_[pos_])) ++pos_;
    if (pos_ == start) fail("expected parameter name");
    std::string name = to_lower(s_.substr(start, pos_ - start));
    skip_ws();
    if (pos_ == s_.size() || s_[pos_] != '=') return {name, {}};
    ++pos_;
    skip_ws();
    std::string value;
    if (pos_ < s_.size() && s_[pos_] == '"') {
      ++pos_;
      for (;;) {
        if (pos_ == s_.size()) fail("unterminated quoted string");
        char c = s_[pos_++];
        if (c == '"') break;
        if (c == '\\') {
          if (pos_ == s_.size()) fail("dangling escape");
          c = s_[pos_++];
        }
        value.push_back(c);
      }
    } else {
      start = pos_;
      while (pos_ < s_.size() && token_char(s_[pos_])) ++pos_;
      if (pos_ == start) fail("expected parameter value");
      value = std::string(s_.substr(start, pos_ - start));
    }
    return {name, value};
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw Error(Errc::kMalformedLink, what + " at offset " + std::to_string(pos_));
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

inline bool rel_has(std::string_view rel, std::string_view token) {
  std::size_t i = 0;
  while (i < rel.size()) {
    auto j = rel.find_first_of(" \t", i);
    if (j == std::string_view::npos) j = rel.size();
    if (j > i && iequals(rel.substr(i, j - i), token)) return true;
    i = j + 1;
  }
  return false;
}

inline std::string quote(std::string_view v) {
  std::string out = "\"";
  for (char c : v) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace detail

/// Parses an `application/link-format` TimeMap. Mementos without an
/// `archive` parameter are attributed to `source`.
inline TimeMap parse_link_format(std::string_view body, const ArchiveId& source = {}) {
  detail::LinkReader reader(body);
  detail::Link link;
  std::optional<OriginalUri> original;
  std::vector<MementoRecord> mementos;
  while (reader.next(link)) {
    const std::string* rel = link.param("rel");
    if (!rel) continue;
    if (detail::rel_has(*rel, "original")) {
      OriginalUri uri = [&] {
        try {
          return OriginalUri(link.target);
        } catch (const Error& e) {
          throw Error(Errc::kMalformedLink, e.what());
        }
      }();
      if (original && normalize_original(*original) != normalize_original(uri))
        throw Error(Errc::kMalformedLink, "conflicting rel=\"original\" links");
      if (!original) original = std::move(uri);
    } else if (detail::rel_has(*rel, "memento")) {
      const std::string* dt = link.param("datetime");
      if (!dt) throw Error(Errc::kBadDatetime, "memento <" + link.target + "> has no datetime");
      auto when = parse_rfc1123(*dt);
      if (!when) throw Error(Errc::kBadDatetime, "'" + *dt + "'");
      ArchiveId archive = source;
      if (const std::string* a = link.param("archive")) {
        try {
          archive = ArchiveId(*a);
        } catch (const Error& e) {
          throw Error(Errc::kMalformedLink, e.what());
        }
      }
      mementos.push_back({link.target, *when, std::move(archive)});
    }
  }
  if (!original) throw Error(Errc::kMissingOriginal, "no rel=\"original\" link");
  return TimeMap(std::move(*original), std::move(mementos));
}

/// One link per line: the original first, then mementos in TimeMap order.
inline std::string serialize_link_format(const TimeMap& tm) {
  std::string out = "<" + tm.original().str() + ">; rel=\"original\"";
  for (const auto& m : tm.mementos()) {
    out += ",\n<" + m.uri_m + ">; rel=\"memento\"; datetime=\"" + format_rfc1123(m.datetime) +
           "\"";
    if (!m.archive.empty()) out += "; archive=" + detail::quote(m.archive.str());
  }
  out += "\n";
  return out;
}

/// Union by uri_m; the first map (in argument order) holding a uri_m keeps
/// its attribution. The result's original is taken from the first map.
inline TimeMap merge_timemaps(std::span<const TimeMap> maps) {
  if (maps.empty()) throw Error(Errc::kNoData, "nothing to merge");
  const auto key = normalize_original(maps.front().original());
  std::size_t total = 0;
  for (const auto& tm : maps) {
    if (normalize_original(tm.original()) != key)
      throw Error(Errc::kMixedOriginals,
                  tm.original().str() + " vs " + maps.front().original().str());
    total += tm.size();
  }
  std::vector<MementoRecord> all;
  all.reserve(total);
  for (const auto& tm : maps) all.insert(all.end(), tm.mementos().begin(), tm.mementos().end());
  return TimeMap(maps.front().original(), std::move(all));
}

}  // namespace arcroute
