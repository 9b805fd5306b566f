#pragma once

#include <array>
#include <charconv>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>

namespace arcroute {

/// UTC instant with second precision.
using Instant = std::chrono::sys_seconds;

namespace detail {

inline constexpr std::array<std::string_view, 7> kWeekdays = {"Sun", "Mon", "Tue", "Wed",
                                                              "Thu", "Fri", "Sat"};
inline constexpr std::array<std::string_view, 12> kMonths = {
    "Jan", "Feb", "Mar", "Apr", "May", "Jun", "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"};

inline std::optional<int> parse_fixed_int(std::string_view s, std::size_t digits) {
  if (s.size() != digits) return std::nullopt;
  int value = 0;
  for (char c : s) {
    if (c < '0' || c > '9') return std::nullopt;
    value = value * 10 + (c - '0');
  }
  return value;
}

inline std::optional<int> month_index(std::string_view name) {
  for (std::size_t i = 0; i < kMonths.size(); ++i)
    if (kMonths[i] == name) return static_cast<int>(i) + 1;
  return std::nullopt;
}

inline std::optional<Instant> make_instant(int y, int mo, int d, int h, int mi, int s) {
  using namespace std::chrono;
  if (h > 23 || mi > 59 || s > 59) return std::nullopt;
  year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) return std::nullopt;
  return sys_days{ymd} + hours{h} + minutes{mi} + seconds{s};
}

struct Civil {
  int year, month, day, hour, minute, second;
  unsigned weekday;
};

inline Civil to_civil(Instant t) {
  using namespace std::chrono;
  auto days = floor<std::chrono::days>(t);
  year_month_day ymd{days};
  hh_mm_ss<seconds> hms{t - days};
  return {static_cast<int>(ymd.year()),
          static_cast<int>(static_cast<unsigned>(ymd.month())),
          static_cast<int>(static_cast<unsigned>(ymd.day())),
          static_cast<int>(hms.hours().count()),
          static_cast<int>(hms.minutes().count()),
          static_cast<int>(hms.seconds().count()),
          weekday{days}.c_encoding()};
}

}  // namespace detail

/// Parses an RFC 1123 date such as "Mon, 01 Jan 2001 00:00:00 GMT".
/// The weekday name must be valid but is not cross-checked against the date.
inline std::optional<Instant> parse_rfc1123(std::string_view s) {
  using detail::parse_fixed_int;
  // "Www, DD Mmm YYYY HH:MM:SS GMT" is exactly 29 characters.
  if (s.size() != 29) return std::nullopt;
  bool weekday_ok = false;
  for (auto w : detail::kWeekdays) weekday_ok |= (s.substr(0, 3) == w);
  if (!weekday_ok || s.substr(3, 2) != ", " || s[7] != ' ' || s[11] != ' ' || s[16] != ' ' ||
      s[19] != ':' || s[22] != ':' || s.substr(25) != " GMT")
    return std::nullopt;
  auto d = parse_fixed_int(s.substr(5, 2), 2);
  auto mo = detail::month_index(s.substr(8, 3));
  auto y = parse_fixed_int(s.substr(12, 4), 4);
  auto h = parse_fixed_int(s.substr(17, 2), 2);
  auto mi = parse_fixed_int(s.substr(20, 2), 2);
  auto sec = parse_fixed_int(s.substr(23, 2), 2);
  if (!d || !mo || !y || !h || !mi || !sec) return std::nullopt;
  return detail::make_instant(*y, *mo, *d, *h, *mi, *sec);
}

inline std::string format_rfc1123(Instant t) {
  auto c = detail::to_civil(t);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s, %02d %s %04d %02d:%02d:%02d GMT",
                detail::kWeekdays[c.weekday].data(), c.day, detail::kMonths[c.month - 1].data(),
                c.year, c.hour, c.minute, c.second);
  return buf;
}

/// "2001-01-01T00:00:00Z"
inline std::string format_iso8601(Instant t) {
  auto c = detail::to_civil(t);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02dZ", c.year, c.month, c.day,
                c.hour, c.minute, c.second);
  return buf;
}

inline std::optional<Instant> parse_iso8601(std::string_view s) {
  using detail::parse_fixed_int;
  if (s.size() != 20 || s[4] != '-' || s[7] != '-' || s[10] != 'T' || s[13] != ':' ||
      s[16] != ':' || s[19] != 'Z')
    return std::nullopt;
  auto y = parse_fixed_int(s.substr(0, 4), 4);
  auto mo = parse_fixed_int(s.substr(5, 2), 2);
  auto d = parse_fixed_int(s.substr(8, 2), 2);
  auto h = parse_fixed_int(s.substr(11, 2), 2);
  auto mi = parse_fixed_int(s.substr(14, 2), 2);
  auto sec = parse_fixed_int(s.substr(17, 2), 2);
  if (!y || !mo || !d || !h || !mi || !sec) return std::nullopt;
  return detail::make_instant(*y, *mo, *d, *h, *mi, *sec);
}

/// Wayback-style 14-digit timestamp, "yyyymmddhhmmss".
inline std::string format_timestamp14(Instant t) {
  auto c = detail::to_civil(t);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%04d%02d%02d%02d%02d%02d", c.year, c.month, c.day, c.hour,
                c.minute, c.second);
  return buf;
}

inline std::optional<Instant> parse_timestamp14(std::string_view s) {
  using detail::parse_fixed_int;
  if (s.size() != 14) return std::nullopt;
  auto y = parse_fixed_int(s.substr(0, 4), 4);
  auto mo = parse_fixed_int(s.substr(4, 2), 2);
  auto d = parse_fixed_int(s.substr(6, 2), 2);
  auto h = parse_fixed_int(s.substr(8, 2), 2);
  auto mi = parse_fixed_int(s.substr(10, 2), 2);
  auto sec = parse_fixed_int(s.substr(12, 2), 2);
  if (!y || !mo || !d || !h || !mi || !sec) return std::nullopt;
  return detail::make_instant(*y, *mo, *d, *h, *mi, *sec);
}

/// Common Log Format timestamp body, e.g. "22/Feb/2012:00:00:00 +0000".
inline std::optional<Instant> parse_clf_datetime(std::string_view s) {
  using detail::parse_fixed_int;
  if (s.size() != 26 || s[2] != '/' || s[6] != '/' || s[11] != ':' || s[14] != ':' ||
      s[17] != ':' || s[20] != ' ' || (s[21] != '+' && s[21] != '-'))
    return std::nullopt;
  auto d = parse_fixed_int(s.substr(0, 2), 2);
  auto mo = detail::month_index(s.substr(3, 3));
  auto y = parse_fixed_int(s.substr(7, 4), 4);
  auto h = parse_fixed_int(s.substr(12, 2), 2);
  auto mi = parse_fixed_int(s.substr(15, 2), 2);
  auto sec = parse_fixed_int(s.substr(18, 2), 2);
  auto oh = parse_fixed_int(s.substr(22, 2), 2);
  auto om = parse_fixed_int(s.substr(24, 2), 2);
  if (!d || !mo || !y || !h || !mi || !sec || !oh || !om) return std::nullopt;
  auto local = detail::make_instant(*y, *mo, *d, *h, *mi, *sec);
  if (!local) return std::nullopt;
  std::chrono::seconds offset{(*oh * 60 + *om) * 60};
  return s[21] == '+' ? *local - offset : *local + offset;
}

/// UTC calendar month, ordered chronologically.
struct Month {
  int year = 1970;
  int month = 1;

  static Month of(Instant t) {
    auto c = detail::to_civil(t);
    return {c.year, c.month};
  }

  static std::optional<Month> parse(std::string_view s) {
    if (s.size() != 7 || s[4] != '-') return std::nullopt;
    auto y = detail::parse_fixed_int(s.substr(0, 4), 4);
    auto m = detail::parse_fixed_int(s.substr(5, 2), 2);
    if (!y || !m || *m < 1 || *m > 12) return std::nullopt;
    return Month{*y, *m};
  }

  int index() const { return year * 12 + (month - 1); }
  static Month from_index(int i) { return {i / 12, i % 12 + 1}; }

  Instant first_instant() const {
    using namespace std::chrono;
    return sys_days{std::chrono::year{year} / std::chrono::month{static_cast<unsigned>(month)} / 1};
  }

  int days() const {
    using namespace std::chrono;
    auto last = year_month_day_last{std::chrono::year{year},
                                    month_day_last{std::chrono::month{static_cast<unsigned>(month)}}};
    return static_cast<int>(static_cast<unsigned>(last.day()));
  }

  std::string str() const {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%04d-%02d", year, month);
    return buf;
  }

  friend auto operator<=>(const Month&, const Month&) = default;
};

}  // namespace arcroute
