#pragma once

#include <chrono>
#include <compare>
#include <cstdio>
#include <string>
#include <string_view>

#include "epigrowth/error.hpp"

namespace epigrowth {

// A calendar day. Stored as days since 1970-01-01 so arithmetic is plain integer math.
class Date {
 public:
  constexpr Date() = default;
  constexpr explicit Date(std::chrono::sys_days d) : days_(d.time_since_epoch().count()) {}
  constexpr Date(int year, unsigned month, unsigned day)
      : Date(std::chrono::sys_days{std::chrono::year{year} / std::chrono::month{month} /
                                   std::chrono::day{day}}) {}

  static constexpr Date from_serial(long serial) {
    Date d;
    d.days_ = serial;
    return d;
  }

  // Strict ISO-8601 calendar date, YYYY-MM-DD.
  static Date parse(std::string_view text) {
    auto bad = [&] { return Error(ErrorKind::parse, "invalid date '" + std::string(text) + "'"); };
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') throw bad();
    int fields[3] = {0, 0, 0};
    const std::size_t starts[3] = {0, 5, 8};
    const std::size_t lens[3] = {4, 2, 2};
    for (int f = 0; f < 3; ++f) {
      for (std::size_t k = 0; k < lens[f]; ++k) {
        char c = text[starts[f] + k];
        if (c < '0' || c > '9') throw bad();
        fields[f] = fields[f] * 10 + (c - '0');
      }
    }
    std::chrono::year_month_day ymd{std::chrono::year{fields[0]},
                                    std::chrono::month{static_cast<unsigned>(fields[1])},
                                    std::chrono::day{static_cast<unsigned>(fields[2])}};
    if (!ymd.ok()) throw bad();
    return Date(std::chrono::sys_days{ymd});
  }

  std::chrono::year_month_day ymd() const { return std::chrono::year_month_day{sys_days()}; }
  constexpr std::chrono::sys_days sys_days() const {
    return std::chrono::sys_days{std::chrono::days{days_}};
  }
  constexpr long serial() const { return days_; }

  std::string iso() const {
    auto d = ymd();
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(d.year()),
                  static_cast<unsigned>(d.month()), static_cast<unsigned>(d.day()));
    return buf;
  }

  constexpr Date operator+(long n) const { return from_serial(days_ + n); }
  constexpr Date operator-(long n) const { return from_serial(days_ - n); }
  constexpr long operator-(Date other) const { return days_ - other.days_; }
  constexpr Date& operator+=(long n) {
    days_ += n;
    return *this;
  }

  constexpr auto operator<=>(const Date&) const = default;

 private:
  long days_ = 0;
};

// Closed interval [first, last] of days.
struct DateInterval {
  Date first;
  Date last;

  constexpr long length() const { return last - first + 1; }
  constexpr bool empty() const { return last < first; }
  constexpr bool contains(Date d) const { return first <= d && d <= last; }

  // Throws a config error on text that is not "YYYY-MM-DD:YYYY-MM-DD" or describes an empty range.
  static DateInterval parse(std::string_view text) {
    auto sep = text.find(':');
    if (sep == std::string_view::npos)
      throw Error(ErrorKind::config, "window must be START:END, got '" + std::string(text) + "'");
    DateInterval w{Date::parse(text.substr(0, sep)), Date::parse(text.substr(sep + 1))};
    if (w.empty()) throw Error(ErrorKind::config, "empty window '" + std::string(text) + "'");
    return w;
  }

  constexpr bool operator==(const DateInterval&) const = default;
};

}  // namespace epigrowth
