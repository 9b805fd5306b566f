#pragma once

#include <algorithm>
#include <fstream>
#include <initializer_list>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "arcroute/error.hpp"
#include "arcroute/memento.hpp"

namespace arcroute {

/// Top-level domain key, e.g. "uk" (or "gc.ca" in compound mode).
using TldLabel = std::string;

/// Lowercase DNS hostname; each label matches [a-z0-9-]{1,63}.
class Hostname {
 public:
  static Hostname parse(std::string_view raw) {
    std::string host = detail::to_lower(raw);
    if (!host.empty() && host.back() == '.') host.pop_back();
    if (host.empty()) throw Error(Errc::kNoHost, "empty hostname");
    Hostname h;
    std::size_t start = 0;
    while (start <= host.size()) {
      auto dot = host.find('.', start);
      if (dot == std::string::npos) dot = host.size();
      auto label = std::string_view(host).substr(start, dot - start);
      if (label.empty() || label.size() > 63 ||
          !std::all_of(label.begin(), label.end(), [](char c) {
            return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '-';
          }))
        throw Error(Errc::kNoHost, "invalid hostname '" + std::string(raw) + "'");
      h.labels_.emplace_back(label);
      start = dot + 1;
    }
    h.text_ = std::move(host);
    return h;
  }

  const std::vector<std::string>& labels() const noexcept { return labels_; }
  const std::string& str() const noexcept { return text_; }

  bool is_ipv4() const {
    return labels_.size() == 4 && std::all_of(labels_.begin(), labels_.end(), [](auto& l) {
             return std::all_of(l.begin(), l.end(), [](char c) { return c >= '0' && c <= '9'; });
           });
  }

  friend bool operator==(const Hostname& a, const Hostname& b) { return a.text_ == b.text_; }

 private:
  Hostname() = default;
  std::vector<std::string> labels_;
  std::string text_;
};

/// Reduces a URI to `http://<host>`: scheme forced to http, host lowercased,
/// port/path/query/fragment dropped.
inline OriginalUri hostify(std::string_view uri) {
  auto parts = detail::split_uri(detail::trim(uri));
  if (!parts || parts->host.empty())
    throw Error(Errc::kNoHost, "'" + std::string(uri) + "'");
  if (parts->host.front() == '[') throw Error(Errc::kNoTld, "IP literal '" + std::string(uri) + "'");
  return OriginalUri("http://" + Hostname::parse(parts->host).str());
}

inline OriginalUri hostify(const OriginalUri& uri) { return hostify(uri.str()); }

/// Like hostify, but also accepts scheme-less inputs such as "example.org/x".
inline OriginalUri hostify_lenient(std::string_view raw) {
  auto s = detail::trim(raw);
  auto parts = detail::split_uri(s);
  if (parts && !parts->host.empty()) return hostify(s);
  if (s.find("://") == std::string_view::npos && s.find(':') == std::string_view::npos)
    return hostify("http://" + std::string(s));
  if (!parts) throw Error(Errc::kNoHost, "'" + std::string(raw) + "'");
  // "example.org:8080/x" splits as scheme "example.org"; retry with a scheme.
  if (parts->rest.substr(0, 2) != "//" && parts->scheme.find('.') != std::string_view::npos)
    return hostify("http://" + std::string(s));
  throw Error(Errc::kNoHost, "'" + std::string(raw) + "'");
}

inline Hostname host_of(const OriginalUri& uri) { return Hostname::parse(uri.host()); }

/// Multi-label public suffixes ("gc.ca", "co.uk"). Lines are suffixes,
/// `#` and `//` start comments; wildcard and exception rules are skipped.
class SuffixList {
 public:
  SuffixList() = default;
  SuffixList(std::initializer_list<std::string_view> suffixes) {
    for (auto s : suffixes) add(s);
  }

  static SuffixList defaults() {
    return {"gc.ca", "co.uk", "ac.uk", "gov.uk", "org.uk", "com.au", "gov.au", "edu.au",
            "co.jp", "ac.jp", "com.tw", "edu.tw", "gov.tw", "com.cn", "edu.cn", "com.br",
            "com.pt", "gov.pt", "co.nz", "com.sg", "edu.sg"};
  }

  static SuffixList load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::kIo, "cannot open suffix list '" + path + "'");
    SuffixList list;
    std::string line;
    while (std::getline(in, line)) {
      std::string_view v = line;
      if (auto c = v.find('#'); c != std::string_view::npos) v = v.substr(0, c);
      if (auto c = v.find("//"); c != std::string_view::npos) v = v.substr(0, c);
      v = detail::trim(v);
      if (v.empty()) continue;
      if (v.front() == '!' || v.find('*') != std::string_view::npos) {
        ++list.skipped_;
        continue;
      }
      list.add(v);
    }
    return list;
  }

  void add(std::string_view suffix) {
    std::string s = detail::to_lower(detail::trim(suffix));
    if (!s.empty() && s.front() == '.') s.erase(0, 1);
    if (!s.empty()) suffixes_.insert(std::move(s));
  }

  bool contains(std::string_view suffix) const { return suffixes_.count(std::string(suffix)) > 0; }
  std::size_t size() const noexcept { return suffixes_.size(); }
  std::size_t skipped() const noexcept { return skipped_; }

 private:
  std::set<std::string> suffixes_;
  std::size_t skipped_ = 0;
};

/// Rightmost label by default; with a suffix list, the longest listed
/// multi-label suffix wins.
class TldExtractor {
 public:
  TldExtractor() = default;
  explicit TldExtractor(SuffixList suffixes) : suffixes_(std::move(suffixes)), compound_(true) {}

  TldLabel operator()(const Hostname& host) const {
    const auto& labels = host.labels();
    if (labels.size() < 2) throw Error(Errc::kNoTld, "single-label host '" + host.str() + "'");
    if (host.is_ipv4()) throw Error(Errc::kNoTld, "IP address '" + host.str() + "'");
    if (compound_) {
      for (std::size_t i = 0; i + 1 < labels.size(); ++i) {
        std::string candidate;
        for (std::size_t j = i; j < labels.size(); ++j) {
          if (!candidate.empty()) candidate += '.';
          candidate += labels[j];
        }
        if (suffixes_.contains(candidate)) return candidate;
      }
    }
    return labels.back();
  }

  TldLabel operator()(const OriginalUri& uri) const { return (*this)(host_of(uri)); }

  bool compound() const noexcept { return compound_; }

 private:
  SuffixList suffixes_;
  bool compound_ = false;
};

inline TldLabel extract_tld(const Hostname& host) { return TldExtractor{}(host); }

}  // namespace arcroute
