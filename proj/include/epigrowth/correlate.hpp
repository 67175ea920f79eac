#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "epigrowth/csv.hpp"
#include "epigrowth/date.hpp"
#include "epigrowth/error.hpp"
#include "epigrowth/growth.hpp"
#include "epigrowth/regress.hpp"
#include "epigrowth/segment.hpp"
#include "epigrowth/timeseries.hpp"

namespace epigrowth {

// ---------------------------------------------------------------------------
// Inputs

// Percentages per metro, organised as factor group -> subcategory.
struct DemographicTable {
  struct Group {
    std::string name;
    std::vector<std::string> subcategories;  // file order
  };
  std::vector<Group> groups;  // age, gender, income, education first, then file order
  std::map<std::string, std::map<std::string, std::map<std::string, double>>> values;  // metro/group/sub

  void add(const std::string& metro, const std::string& group, const std::string& sub, double percent) {
    if (!std::isfinite(percent) || percent < 0.0 || percent > 100.0)
      throw Error(ErrorKind::validation, metro + "/" + group + "/" + sub + ": percent must be within [0, 100]");
    auto g = std::find_if(groups.begin(), groups.end(), [&](const Group& x) { return x.name == group; });
    if (g == groups.end()) {
      static constexpr std::array<std::string_view, 4> canonical{"age", "gender", "income", "education"};
      auto rank = [&](const std::string& n) {
        auto it = std::find(canonical.begin(), canonical.end(), n);
        return it == canonical.end() ? canonical.size() : static_cast<std::size_t>(it - canonical.begin());
      };
      auto pos = std::find_if(groups.begin(), groups.end(),
                              [&](const Group& x) { return rank(x.name) > rank(group); });
      g = groups.insert(pos, Group{group, {}});
    }
    if (std::find(g->subcategories.begin(), g->subcategories.end(), sub) == g->subcategories.end())
      g->subcategories.push_back(sub);
    auto [it, fresh] = values[metro][group].emplace(sub, percent);
    if (!fresh) throw Error(ErrorKind::validation, "duplicate demographic entry " + metro + "/" + group + "/" + sub);
  }
};

inline DemographicTable load_demographics(std::istream& in) {
  auto table = csv::read_table(in);
  csv::expect_header(table, {"metro", "group", "subcategory", "percent"});
  DemographicTable demo;
  for (const auto& row : table.rows) {
    csv::expect_width(row, 4);
    double pct = csv::parse_double(row, 3, "percent");
    try {
      demo.add(row.fields[0], row.fields[1], row.fields[2], pct);
    } catch (const Error& e) {
      throw Error(ErrorKind::validation, "line " + std::to_string(row.line) + ": column 'percent': " + e.what());
    }
  }
  return demo;
}

inline void write_demographics(std::ostream& out, const DemographicTable& demo) {
  out << "metro,group,subcategory,percent\n";
  for (const auto& [metro, groups] : demo.values)
    for (const auto& g : demo.groups) {
      auto it = groups.find(g.name);
      if (it == groups.end()) continue;
      for (const auto& sub : g.subcategories) {
        auto v = it->second.find(sub);
        if (v != it->second.end())
          out << metro << ',' << g.name << ',' << sub << ',' << csv::format(v->second) << '\n';
      }
    }
}

inline constexpr std::array<std::string_view, 5> weather_types{"sunny", "rainy", "cloudy", "foggy", "snowy"};

inline bool is_weather_type(std::string_view s) {
  return std::find(weather_types.begin(), weather_types.end(), s) != weather_types.end();
}

struct WeatherDay {
  double high_temp = 0.0;  // Fahrenheit
  double low_temp = 0.0;
  std::string type;
};

struct WeatherTable {
  std::map<std::pair<std::string, Date>, WeatherDay> rows;

  void add(const std::string& metro, Date date, WeatherDay day) {
    if (!is_weather_type(day.type))
      throw Error(ErrorKind::validation, "column 'type': unknown weather label '" + day.type + "'");
    if (!std::isfinite(day.high_temp) || !std::isfinite(day.low_temp))
      throw Error(ErrorKind::validation, "temperatures must be finite");
    if (!rows.emplace(std::pair{metro, date}, std::move(day)).second)
      throw Error(ErrorKind::validation, "duplicate weather row for (" + metro + ", " + date.iso() + ")");
  }

  const WeatherDay* find(const std::string& metro, Date date) const {
    auto it = rows.find({metro, date});
    return it == rows.end() ? nullptr : &it->second;
  }
};

inline WeatherTable load_weather(std::istream& in) {
  auto table = csv::read_table(in);
  csv::expect_header(table, {"metro", "date", "high_temp", "low_temp", "type"});
  WeatherTable w;
  for (const auto& row : table.rows) {
    csv::expect_width(row, 5);
    Date date;
    try {
      date = Date::parse(row.fields[1]);
    } catch (const Error& e) {
      throw ParseError(row.line, e.what());
    }
    WeatherDay day{csv::parse_double(row, 2, "high_temp"), csv::parse_double(row, 3, "low_temp"), row.fields[4]};
    try {
      w.add(row.fields[0], date, std::move(day));
    } catch (const Error& e) {
      throw Error(ErrorKind::validation, "line " + std::to_string(row.line) + ": " + e.what());
    }
  }
  return w;
}

inline void write_weather(std::ostream& out, const WeatherTable& w) {
  out << "metro,date,high_temp,low_temp,type\n";
  for (const auto& [key, day] : w.rows)
    out << key.first << ',' << key.second.iso() << ',' << csv::format(day.high_temp) << ','
        << csv::format(day.low_temp) << ',' << day.type << '\n';
}

// ---------------------------------------------------------------------------
// Reports

enum class NaReason { none, rank_deficient, insufficient_samples, reference };

inline const char* to_string(NaReason r) {
  switch (r) {
    case NaReason::none: return "";
    case NaReason::rank_deficient: return "rank-deficient";
    case NaReason::insufficient_samples: return "insufficient-samples";
    case NaReason::reference: return "reference";
  }
  return "";
}

struct ReportCell {
  std::string row;
  std::string column;
  std::optional<double> value;
  std::size_t n = 0;
  NaReason reason = NaReason::none;
};

struct CorrelationReport {
  std::string study;
  std::vector<ReportCell> p_values;
  std::vector<ReportCell> r_squared;
  std::vector<std::string> diagnostics;

  const ReportCell* p_cell(std::string_view row, std::string_view column) const {
    for (const auto& c : p_values)
      if (c.row == row && c.column == column) return &c;
    return nullptr;
  }
  const ReportCell* r2_cell(std::string_view row, std::string_view column = {}) const {
    for (const auto& c : r_squared)
      if (c.row == row && c.column == column) return &c;
    return nullptr;
  }
};

inline double weighted_average(std::span<const double> k, std::span<const double> lengths) {
  if (k.size() != lengths.size() || k.empty())
    throw Error(ErrorKind::shape, "rates and lengths must share a non-zero length");
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < k.size(); ++i) {
    num += k[i] * lengths[i];
    den += lengths[i];
  }
  return num / den;
}

// Length-weighted mean of the five period growth rates.
inline double weighted_avg_growth(const GrowthRates& rates, const PeriodSet& periods) {
  std::array<double, period_count> k{}, len{};
  for (std::size_t i = 0; i < period_count; ++i) {
    if (!rates.k[i])
      throw Error(ErrorKind::incomparable, periods.metro + " period " + std::to_string(i + 1) + ": growth rate is NA");
    k[i] = *rates.k[i];
    len[i] = static_cast<double>(periods.periods[i].length());
  }
  return weighted_average(k, len);
}

// One regression per factor group: response = per-metro growth rate, predictors = the
// group's subcategory percentages. When every metro's shares in a group add up to the
// same total the columns are collinear with the intercept; the last subcategory is then
// dropped and reported as the reference.
inline CorrelationReport demographic_study(const DemographicTable& demo,
                                           const std::map<std::string, double>& growth) {
  CorrelationReport rep;
  rep.study = "demographics";
  for (const auto& group : demo.groups) {
    std::vector<std::string> metros;
    for (const auto& [metro, y] : growth) {
      auto m = demo.values.find(metro);
      const std::map<std::string, double>* g = nullptr;
      if (m != demo.values.end()) {
        auto it = m->second.find(group.name);
        if (it != m->second.end()) g = &it->second;
      }
      bool complete = g && std::all_of(group.subcategories.begin(), group.subcategories.end(),
                                       [&](const std::string& s) { return g->count(s) > 0; });
      if (complete)
        metros.push_back(metro);
      else
        rep.diagnostics.push_back(metro + ": incomplete " + group.name + " data, skipped for this group");
    }

    const std::size_t n = metros.size();
    std::vector<std::string> used = group.subcategories;
    std::optional<std::string> reference;
    if (n > 0 && used.size() > 1) {
      std::vector<double> sums;
      for (const auto& metro : metros) {
        double s = 0.0;
        for (const auto& sub : used) s += demo.values.at(metro).at(group.name).at(sub);
        sums.push_back(s);
      }
      auto [lo, hi] = std::minmax_element(sums.begin(), sums.end());
      if (*hi - *lo <= 1e-9 * std::max(1.0, std::abs(*hi))) {
        reference = used.back();
        used.pop_back();
      }
    }

    auto push_na = [&](NaReason why) {
      for (const auto& sub : group.subcategories)
        rep.p_values.push_back({group.name, sub, std::nullopt, n, sub == reference ? NaReason::reference : why});
      rep.r_squared.push_back({group.name, {}, std::nullopt, n, why});
    };
    if (n < used.size() + 2) {
      push_na(NaReason::insufficient_samples);
      continue;
    }

    Eigen::MatrixXd x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(used.size()));
    Eigen::VectorXd y(static_cast<Eigen::Index>(n));
    for (std::size_t r = 0; r < n; ++r) {
      y(static_cast<Eigen::Index>(r)) = growth.at(metros[r]);
      for (std::size_t c = 0; c < used.size(); ++c)
        x(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
            demo.values.at(metros[r]).at(group.name).at(used[c]);
    }
    auto fit = fit_multi(x, y);
    if (fit.rank_deficient() || !fit.r_squared) {
      push_na(NaReason::rank_deficient);
      continue;
    }
    for (std::size_t c = 0; c < used.size(); ++c)
      rep.p_values.push_back({group.name, used[c], fit.p_values[c + 1], n, NaReason::none});
    if (reference) rep.p_values.push_back({group.name, *reference, std::nullopt, n, NaReason::reference});
    rep.r_squared.push_back({group.name, {}, fit.r_squared, n, NaReason::none});
  }
  return rep;
}

enum class WeatherMode { type, high_temp, low_temp };

inline const char* to_string(WeatherMode m) {
  switch (m) {
    case WeatherMode::type: return "type";
    case WeatherMode::high_temp: return "high-temp";
    case WeatherMode::low_temp: return "low-temp";
  }
  return "?";
}

// Daily growth proxy: ln c(d) - ln c(d-1) for days d in (start, end] where both counts
// are positive. Kept separate so another response definition can be substituted.
inline std::vector<std::pair<Date, double>> daily_log_growth(const CaseSeries& series, const Period& period) {
  std::vector<std::pair<Date, double>> out;
  for (Date d = period.start + 1; d <= period.end; d += 1) {
    auto now = series.at(d), prev = series.at(d - 1);
    if (now && prev && *now > 0.0 && *prev > 0.0) out.emplace_back(d, std::log(*now) - std::log(*prev));
  }
  return out;
}

// One regression per period of the daily growth proxy on dummy-coded weather
// categories. The cell value is the smallest coefficient p-value.
inline CorrelationReport weather_study(const WeatherTable& weather, const CaseSeries& series,
                                       const PeriodSet& periods, WeatherMode mode) {
  CorrelationReport rep;
  rep.study = std::string("weather-") + to_string(mode);
  const std::string& metro = series.region;
  for (const auto& period : periods.periods) {
    const std::string col = "P" + std::to_string(period.index);
    auto obs = daily_log_growth(series, period);
    std::vector<std::string> labels;
    Eigen::VectorXd y(static_cast<Eigen::Index>(obs.size()));
    for (std::size_t k = 0; k < obs.size(); ++k) {
      const WeatherDay* day = weather.find(metro, obs[k].first);
      if (!day) throw Error(ErrorKind::validation, "no weather for " + metro + " on " + obs[k].first.iso());
      switch (mode) {
        case WeatherMode::type:
          if (!is_weather_type(day->type))
            throw Error(ErrorKind::validation, "column 'type': unknown weather label '" + day->type + "'");
          labels.push_back(day->type);
          break;
        case WeatherMode::high_temp:
          labels.emplace_back(to_string(bucket_temperature(day->high_temp, TempScheme::high_temp)));
          break;
        case WeatherMode::low_temp:
          labels.emplace_back(to_string(bucket_temperature(day->low_temp, TempScheme::low_temp)));
          break;
      }
      y(static_cast<Eigen::Index>(k)) = obs[k].second;
    }

    const std::size_t n = obs.size();
    auto na = [&](NaReason why) {
      rep.p_values.push_back({metro, col, std::nullopt, n, why});
      rep.r_squared.push_back({metro, col, std::nullopt, n, why});
    };
    if (n == 0) {
      na(NaReason::insufficient_samples);
      continue;
    }
    auto enc = encode_dummies(labels);
    if (enc.columns.empty()) {
      na(NaReason::rank_deficient);
      continue;
    }
    if (n < enc.columns.size() + 2) {
      na(NaReason::insufficient_samples);
      continue;
    }
    auto fit = fit_multi(enc.matrix(n), y);
    if (fit.rank_deficient() || !fit.r_squared) {
      na(NaReason::rank_deficient);
      continue;
    }
    double best = 1.0;
    for (std::size_t j = 1; j < fit.p_values.size(); ++j) best = std::min(best, *fit.p_values[j]);
    rep.p_values.push_back({metro, col, best, n, NaReason::none});
    rep.r_squared.push_back({metro, col, fit.r_squared, n, NaReason::none});
  }
  return rep;
}

inline void append(CorrelationReport& into, const CorrelationReport& from) {
  into.p_values.insert(into.p_values.end(), from.p_values.begin(), from.p_values.end());
  into.r_squared.insert(into.r_squared.end(), from.r_squared.begin(), from.r_squared.end());
  into.diagnostics.insert(into.diagnostics.end(), from.diagnostics.begin(), from.diagnostics.end());
}

// group,subcategory,p_value,group_r2,n
inline void write_demographic_report(std::ostream& out, const CorrelationReport& rep) {
  out << "group,subcategory,p_value,group_r2,n\n";
  for (const auto& c : rep.p_values) {
    const ReportCell* r2 = rep.r2_cell(c.row);
    out << c.row << ',' << c.column << ',' << csv::format(c.value) << ','
        << (r2 ? csv::format(r2->value) : std::string(csv::na)) << ',' << c.n << '\n';
  }
}

// metro,P1..P5 matrix of cell p-values in first-seen metro order.
inline void write_weather_report(std::ostream& out, const CorrelationReport& rep) {
  out << "metro";
  for (std::size_t i = 1; i <= period_count; ++i) out << ",P" << i;
  out << '\n';
  std::vector<std::string> metros;
  for (const auto& c : rep.p_values)
    if (std::find(metros.begin(), metros.end(), c.row) == metros.end()) metros.push_back(c.row);
  for (const auto& m : metros) {
    out << m;
    for (std::size_t i = 1; i <= period_count; ++i) {
      const ReportCell* c = rep.p_cell(m, "P" + std::to_string(i));
      out << ',' << (c ? csv::format(c->value) : std::string(csv::na));
    }
    out << '\n';
  }
}

}  // namespace epigrowth
