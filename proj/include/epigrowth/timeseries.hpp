#pragma once

#include <algorithm>
#include <cmath>
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

namespace epigrowth {

// Daily infected counts for one region. counts[i] belongs to start + i days.
//
// Counts are used as the infected-population proxy directly; whether the source
// reports cumulative or active cases is up to the data supplier, and nothing here
// differences or smooths them.
struct CaseSeries {
  std::string region;
  Date start;
  std::vector<double> counts;

  Date end() const { return start + static_cast<long>(counts.size()) - 1; }
  DateInterval span() const { return {start, end()}; }

  std::optional<double> at(Date d) const {
    if (d < start || d > end()) return std::nullopt;
    return counts[static_cast<std::size_t>(d - start)];
  }

  // First day with a strictly positive count.
  std::optional<Date> first_case() const {
    for (std::size_t i = 0; i < counts.size(); ++i)
      if (counts[i] > 0.0) return start + static_cast<long>(i);
    return std::nullopt;
  }
};

struct LogPoint {
  long day;  // days since the owning series' start date
  double log_count;
};

// ln(count) on positive-count days, strictly increasing in day.
struct LogSeries {
  std::vector<LogPoint> points;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
};

// county -> metro
struct MetroMap {
  std::map<std::string, std::string> entries;
};

struct LoadedCases {
  std::vector<CaseSeries> series;  // sorted by region
  std::vector<std::string> warnings;
};

// Parses a cases CSV (`date,region,count`). Rows may arrive in any order.
// Missing days inside a region's range are filled with the previous day's count
// and reported in `warnings`.
inline LoadedCases load_cases(std::istream& in) {
  auto table = csv::read_table(in);
  csv::expect_header(table, {"date", "region", "count"});

  std::map<std::string, std::map<Date, double>> by_region;
  for (const auto& row : table.rows) {
    csv::expect_width(row, 3);
    Date date;
    try {
      date = Date::parse(row.fields[0]);
    } catch (const Error& e) {
      throw ParseError(row.line, e.what());
    }
    const std::string& region = row.fields[1];
    if (region.empty()) throw ParseError(row.line, "empty region");
    double count = csv::parse_double(row, 2, "count");
    if (count < 0.0)
      throw Error(ErrorKind::validation, "line " + std::to_string(row.line) +
                                             ": negative count " + row.fields[2] + " for " + region);
    auto [it, inserted] = by_region[region].emplace(date, count);
    if (!inserted)
      throw Error(ErrorKind::validation, "line " + std::to_string(row.line) + ": duplicate row for (" +
                                             date.iso() + ", " + region + ")");
  }

  LoadedCases out;
  for (const auto& [region, days] : by_region) {
    CaseSeries s{region, days.begin()->first, {}};
    Date last = days.rbegin()->first;
    s.counts.reserve(static_cast<std::size_t>(last - s.start + 1));
    auto it = days.begin();
    for (Date d = s.start; d <= last; d += 1) {
      if (it != days.end() && it->first == d) {
        s.counts.push_back(it->second);
        ++it;
      } else {
        s.counts.push_back(s.counts.back());
        out.warnings.push_back(region + ": missing " + d.iso() + ", carried forward " +
                               csv::format(s.counts.back()));
      }
    }
    out.series.push_back(std::move(s));
  }
  return out;
}

inline void write_cases(std::ostream& out, std::span<const CaseSeries> series) {
  out << "date,region,count\n";
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.counts.size(); ++i)
      out << (s.start + static_cast<long>(i)).iso() << ',' << s.region << ','
          << csv::format(s.counts[i]) << '\n';
}

inline MetroMap load_metro_map(std::istream& in) {
  auto table = csv::read_table(in);
  csv::expect_header(table, {"county", "metro"});
  MetroMap map;
  for (const auto& row : table.rows) {
    csv::expect_width(row, 2);
    if (row.fields[0].empty() || row.fields[1].empty())
      throw ParseError(row.line, "empty county or metro");
    auto [it, inserted] = map.entries.emplace(row.fields[0], row.fields[1]);
    if (!inserted && it->second != row.fields[1])
      throw Error(ErrorKind::validation, "line " + std::to_string(row.line) + ": county '" +
                                             row.fields[0] + "' mapped to both '" + it->second +
                                             "' and '" + row.fields[1] + "'");
  }
  return map;
}

inline void write_metro_map(std::ostream& out, const MetroMap& map) {
  out << "county,metro\n";
  for (const auto& [county, metro] : map.entries) out << county << ',' << metro << '\n';
}

// Day-wise sum of member counties. The metro range is the union of member ranges;
// a county contributes 0 before its first day and its last value after its last day.
inline std::vector<CaseSeries> aggregate_to_metros(std::span<const CaseSeries> counties,
                                                   const MetroMap& map) {
  std::string unmapped;
  std::map<std::string, std::vector<const CaseSeries*>> members;
  for (const auto& c : counties) {
    auto it = map.entries.find(c.region);
    if (it == map.entries.end()) {
      unmapped += (unmapped.empty() ? "" : ", ") + c.region;
      continue;
    }
    members[it->second].push_back(&c);
  }
  if (!unmapped.empty())
    throw Error(ErrorKind::validation, "counties missing from metro map: " + unmapped);

  std::vector<CaseSeries> out;
  for (const auto& [metro, list] : members) {
    Date first = list.front()->start;
    Date last = list.front()->end();
    for (const auto* c : list) {
      first = std::min(first, c->start);
      last = std::max(last, c->end());
    }
    CaseSeries m{metro, first, std::vector<double>(static_cast<std::size_t>(last - first + 1), 0.0)};
    for (std::size_t i = 0; i < m.counts.size(); ++i) {
      Date d = first + static_cast<long>(i);
      for (const auto* c : list) {
        if (d < c->start) continue;
        m.counts[i] += d > c->end() ? c->counts.back() : *c->at(d);
      }
    }
    out.push_back(std::move(m));
  }
  return out;
}

// Natural log of every positive count inside `window`. Day indices stay anchored at
// the series start so fits over different windows share one time axis.
inline LogSeries to_log_series(const CaseSeries& series, DateInterval window) {
  LogSeries out;
  Date lo = std::max(window.first, series.start);
  Date hi = std::min(window.last, series.end());
  for (Date d = lo; d <= hi; d += 1) {
    auto i = static_cast<std::size_t>(d - series.start);
    if (series.counts[i] > 0.0) out.points.push_back({d - series.start, std::log(series.counts[i])});
  }
  if (out.empty())
    throw Error(ErrorKind::empty_series, series.region + ": no positive counts in " +
                                             window.first.iso() + ".." + window.last.iso());
  return out;
}

}  // namespace epigrowth
