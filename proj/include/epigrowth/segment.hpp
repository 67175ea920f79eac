#pragma once

#include <algorithm>
#include <array>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "epigrowth/csv.hpp"
#include "epigrowth/date.hpp"
#include "epigrowth/error.hpp"
#include "epigrowth/regress.hpp"
#include "epigrowth/timeseries.hpp"

namespace epigrowth {

inline constexpr std::size_t period_count = 5;

struct SegmentDefaults {
  static constexpr long min_period_length = 7;
  static constexpr long search_radius = 14;
  static constexpr Date announcement{2020, 3, 29};
  static constexpr DateInterval window{Date{2020, 3, 1}, Date{2020, 6, 30}};
  // Period 2..5 start offsets from the announcement date.
  static constexpr std::array<long, 4> anchor_offsets{3, 22, 42, 64};
};

struct Period {
  int index = 0;  // 1-based
  Date start;
  Date end;  // inclusive
  std::optional<SimpleFit> fit;

  long length() const { return end - start + 1; }
  DateInterval interval() const { return {start, end}; }
};

struct PeriodSet {
  std::string metro;
  std::array<Period, period_count> periods;

  DateInterval window() const { return {periods.front().start, periods.back().end}; }

  std::array<long, period_count> lengths() const {
    std::array<long, period_count> out{};
    for (std::size_t i = 0; i < period_count; ++i) out[i] = periods[i].length();
    return out;
  }

  // Start dates of periods 2..5.
  std::array<Date, period_count - 1> anchors() const {
    std::array<Date, period_count - 1> out{};
    for (std::size_t i = 1; i < period_count; ++i) out[i - 1] = periods[i].start;
    return out;
  }

  bool fitted() const {
    return std::all_of(periods.begin(), periods.end(), [](const Period& p) { return p.fit.has_value(); });
  }

  // Contiguity and ordering; throws a state error when violated.
  void validate() const {
    for (std::size_t i = 0; i < period_count; ++i) {
      const auto& p = periods[i];
      if (p.index != static_cast<int>(i + 1) || p.end < p.start)
        throw Error(ErrorKind::state, metro + ": malformed period " + std::to_string(i + 1));
      if (i > 0 && p.start != periods[i - 1].end + 1)
        throw Error(ErrorKind::state, metro + ": periods " + std::to_string(i) + " and " +
                                          std::to_string(i + 1) + " are not contiguous");
    }
  }
};

inline std::array<Date, period_count - 1> default_anchors(
    Date announcement = SegmentDefaults::announcement,
    std::array<long, period_count - 1> offsets = SegmentDefaults::anchor_offsets) {
  std::array<Date, period_count - 1> out{};
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = announcement + offsets[i];
  return out;
}

// Five periods; anchors are the start dates of periods 2..5.
inline PeriodSet initial_periods(DateInterval window, std::array<Date, period_count - 1> anchors,
                                 std::string metro = {}) {
  if (window.empty()) throw Error(ErrorKind::validation, "empty analysis window");
  for (std::size_t i = 0; i < anchors.size(); ++i) {
    if (anchors[i] <= window.first || anchors[i] > window.last)
      throw Error(ErrorKind::validation, "anchor " + anchors[i].iso() + " must fall after " +
                                             window.first.iso() + " and no later than " +
                                             window.last.iso());
    if (i > 0 && anchors[i] <= anchors[i - 1])
      throw Error(ErrorKind::validation, "anchors must be strictly increasing");
  }
  PeriodSet set;
  set.metro = std::move(metro);
  for (std::size_t i = 0; i < period_count; ++i) {
    auto& p = set.periods[i];
    p.index = static_cast<int>(i + 1);
    p.start = i == 0 ? window.first : anchors[i - 1];
    p.end = i + 1 == period_count ? window.last : anchors[i] - 1;
  }
  return set;
}

namespace detail {

// Log points of one series restricted to a window, with O(log n) slicing by day.
class LogWindow {
 public:
  LogWindow(const CaseSeries& series, DateInterval window) : origin_(window.first) {
    for (Date d = window.first; d <= window.last; d += 1) {
      auto c = series.at(d);
      if (c && *c > 0.0) points_.push_back({d - origin_, std::log(*c)});
    }
  }

  std::span<const LogPoint> slice(Date first, Date last) const {
    auto lo = std::lower_bound(points_.begin(), points_.end(), first - origin_,
                               [](const LogPoint& p, long day) { return p.day < day; });
    auto hi = std::upper_bound(points_.begin(), points_.end(), last - origin_,
                               [](long day, const LogPoint& p) { return day < p.day; });
    return {lo, hi};
  }

  std::optional<SimpleFit> fit(Date first, Date last) const {
    auto pts = slice(first, last);
    if (pts.size() < 2) return std::nullopt;
    return fit_simple(pts);
  }

 private:
  Date origin_;
  std::vector<LogPoint> points_;
};

// Length-weighted mean R^2; a period without a fit scores 0.
inline double weighted_r2(const LogWindow& lw, Date window_first,
                          const std::array<long, period_count + 1>& cuts) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < period_count; ++i) {
    Date s = window_first + cuts[i];
    Date e = window_first + cuts[i + 1] - 1;
    auto len = static_cast<double>(cuts[i + 1] - cuts[i]);
    auto f = lw.fit(s, e);
    num += len * (f ? f->r_squared : 0.0);
    den += len;
  }
  return num / den;
}

inline std::array<long, period_count + 1> cuts_of(const PeriodSet& set) {
  std::array<long, period_count + 1> cuts{};
  Date first = set.window().first;
  for (std::size_t i = 0; i < period_count; ++i) cuts[i] = set.periods[i].start - first;
  cuts[period_count] = set.window().last - first + 1;
  return cuts;
}

inline void check_covers(const CaseSeries& series, DateInterval window) {
  if (series.start > window.first || series.end() < window.last)
    throw Error(ErrorKind::validation, series.region + ": series " + series.start.iso() + ".." +
                                           series.end().iso() + " does not cover window " +
                                           window.first.iso() + ".." + window.last.iso());
}

}  // namespace detail

// Fits every period of `set` against `series` in place. Periods with fewer than two
// positive days keep an empty fit.
inline void fit_periods(const CaseSeries& series, PeriodSet& set) {
  detail::LogWindow lw(series, set.window());
  for (auto& p : set.periods) p.fit = lw.fit(p.start, p.end);
}

// Objective maximized by optimize_boundaries.
inline double segmentation_objective(const CaseSeries& series, const PeriodSet& set) {
  detail::LogWindow lw(series, set.window());
  return detail::weighted_r2(lw, set.window().first, detail::cuts_of(set));
}

// Coordinate ascent over the four interior boundaries. Each boundary may move at most
// `search_radius` days from its initial position while every period keeps at least
// `min_len` days. A boundary moves only to a strictly better position; among equally
// good candidates the earliest wins. Sweeps repeat until nothing moves.
inline PeriodSet optimize_boundaries(const CaseSeries& series, const PeriodSet& initial,
                                     long search_radius = SegmentDefaults::search_radius,
                                     long min_len = SegmentDefaults::min_period_length) {
  initial.validate();
  if (search_radius < 0) throw Error(ErrorKind::config, "search radius must be >= 0");
  if (min_len < 1) throw Error(ErrorKind::config, "minimum period length must be >= 1");
  const DateInterval window = initial.window();
  detail::check_covers(series, window);
  if (window.length() < static_cast<long>(period_count) * min_len)
    throw Error(ErrorKind::infeasible, "window of " + std::to_string(window.length()) +
                                           " days cannot hold 5 periods of " +
                                           std::to_string(min_len) + " days");
  for (const auto& p : initial.periods)
    if (p.length() < min_len)
      throw Error(ErrorKind::infeasible, "initial period " + std::to_string(p.index) + " is shorter than " +
                                             std::to_string(min_len) + " days");

  detail::LogWindow lw(series, window);
  const auto start = detail::cuts_of(initial);
  auto cuts = start;
  double current = detail::weighted_r2(lw, window.first, cuts);

  for (bool moved = true; moved;) {
    moved = false;
    for (std::size_t j = 1; j < period_count; ++j) {
      long lo = std::max(start[j] - search_radius, cuts[j - 1] + min_len);
      long hi = std::min(start[j] + search_radius, cuts[j + 1] - min_len);
      // the current position always lies in [lo, hi]
      auto trial = cuts;
      double best = -1.0;
      long best_pos = cuts[j];
      for (long c = lo; c <= hi; ++c) {
        trial[j] = c;
        double v = detail::weighted_r2(lw, window.first, trial);
        if (v > best) {
          best = v;
          best_pos = c;
        }
      }
      if (best > current && best_pos != cuts[j]) {
        cuts[j] = best_pos;
        current = best;
        moved = true;
      }
    }
  }

  PeriodSet out = initial;
  for (std::size_t i = 0; i < period_count; ++i) {
    out.periods[i].start = window.first + cuts[i];
    out.periods[i].end = window.first + cuts[i + 1] - 1;
    out.periods[i].fit = lw.fit(out.periods[i].start, out.periods[i].end);
  }
  out.validate();
  return out;
}

struct ProtocolResult {
  std::optional<Date> date;
  std::string diagnostic;
};

// Start of the first period that begins on or after the announcement and whose
// fitted slope is strictly below the previous period's slope.
inline ProtocolResult protocol_followed_date(const PeriodSet& set, Date announcement) {
  if (!set.fitted()) throw Error(ErrorKind::state, set.metro + ": periods are not fitted");
  for (std::size_t i = 1; i < period_count; ++i) {
    const auto& p = set.periods[i];
    if (p.start >= announcement && p.fit->slope < set.periods[i - 1].fit->slope) return {p.start, {}};
  }
  std::string slopes;
  for (const auto& p : set.periods) slopes += (slopes.empty() ? "" : " ") + csv::format(p.fit->slope);
  return {std::nullopt, "no slope decline after " + announcement.iso() + "; slopes " + slopes};
}

inline void write_periods(std::ostream& out, std::span<const PeriodSet> sets) {
  out << "metro,period_index,start,end,slope,intercept,r2\n";
  for (const auto& set : sets)
    for (const auto& p : set.periods) {
      out << set.metro << ',' << p.index << ',' << p.start.iso() << ',' << p.end.iso() << ',';
      if (p.fit)
        out << csv::format(p.fit->slope) << ',' << csv::format(p.fit->intercept) << ','
            << csv::format(p.fit->r_squared) << '\n';
      else
        out << "NA,NA,NA\n";
    }
}

// Inverse of write_periods. Fits carry n = 0 since the sample count is not stored.
inline std::vector<PeriodSet> read_periods(std::istream& in) {
  auto table = csv::read_table(in);
  csv::expect_header(table, {"metro", "period_index", "start", "end", "slope", "intercept", "r2"});
  std::map<std::string, std::array<std::optional<Period>, period_count>> rows;
  std::vector<std::string> order;
  for (const auto& row : table.rows) {
    csv::expect_width(row, 7);
    long idx = csv::parse_long(row, 1, "period_index");
    if (idx < 1 || idx > static_cast<long>(period_count))
      throw ParseError(row.line, "period_index must be 1..5");
    Period p;
    p.index = static_cast<int>(idx);
    try {
      p.start = Date::parse(row.fields[2]);
      p.end = Date::parse(row.fields[3]);
    } catch (const Error& e) {
      throw ParseError(row.line, e.what());
    }
    auto slope = csv::parse_optional(row, 4, "slope");
    auto intercept = csv::parse_optional(row, 5, "intercept");
    auto r2 = csv::parse_optional(row, 6, "r2");
    if (slope && intercept && r2) p.fit = SimpleFit{*slope, *intercept, *r2, 0};
    auto [it, fresh] = rows.try_emplace(row.fields[0]);
    if (fresh) order.push_back(row.fields[0]);
    auto& slot = it->second[static_cast<std::size_t>(idx - 1)];
    if (slot) throw Error(ErrorKind::validation, "line " + std::to_string(row.line) + ": duplicate period");
    slot = p;
  }
  std::vector<PeriodSet> out;
  for (const auto& metro : order) {
    PeriodSet set;
    set.metro = metro;
    for (std::size_t i = 0; i < period_count; ++i) {
      if (!rows[metro][i])
        throw Error(ErrorKind::validation, metro + ": missing period " + std::to_string(i + 1));
      set.periods[i] = *rows[metro][i];
    }
    set.validate();
    out.push_back(std::move(set));
  }
  return out;
}

}  // namespace epigrowth
