#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <future>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "epigrowth/correlate.hpp"
#include "epigrowth/csv.hpp"
#include "epigrowth/date.hpp"
#include "epigrowth/error.hpp"
#include "epigrowth/fit.hpp"
#include "epigrowth/fixtures.hpp"
#include "epigrowth/segment.hpp"
#include "epigrowth/sir.hpp"
#include "epigrowth/timeseries.hpp"

// The batch pipeline behind the command-line tool. Each cmd_* reads its inputs from
// the paths in RunConfig, writes report files under `out`, and returns what it wrote.
namespace epigrowth::pipeline {

using json = nlohmann::ordered_json;

struct RunConfig {
  std::string cases;
  std::string metro_map;
  std::string demographics;
  std::string weather;
  std::string inflow;
  std::string periods;      // periods CSV from a previous segment run
  std::string fit_report;   // fit JSON, source of simulate parameters
  std::string metro;        // simulate: which metro; empty = first
  std::string study = "auto";

  DateInterval window = SegmentDefaults::window;
  std::optional<std::array<Date, period_count - 1>> anchors;
  Date announcement = SegmentDefaults::announcement;
  long radius = SegmentDefaults::search_radius;
  long min_period = SegmentDefaults::min_period_length;

  Model model = Model::delayed;
  TuneGlobals globals;
  double population = 1e6;
  std::optional<GridAxis> beta_grid;
  std::optional<GridAxis> gamma_grid;
  int refine = 3;
  bool shared_beta = false;
  std::optional<double> beta;  // simulate without a fit report
  std::optional<double> gamma;
  std::optional<double> i0;

  std::string out = ".";
  std::uint64_t seed = 1;
  int fixture_metros = 11;

  std::array<Date, period_count - 1> resolved_anchors() const {
    return anchors ? *anchors : default_anchors(announcement);
  }
};

inline std::string sanitize(std::string s) {
  std::replace(s.begin(), s.end(), ',', ';');
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

inline std::string out_path(const RunConfig& cfg, const std::string& name) {
  std::error_code ec;
  std::filesystem::create_directories(cfg.out, ec);
  if (ec) throw Error(ErrorKind::io, "cannot create output directory '" + cfg.out + "'");
  return (std::filesystem::path(cfg.out) / name).string();
}

inline void write_file(const std::string& path, const std::function<void(std::ostream&)>& body) {
  auto out = csv::open_output(path);
  body(out);
  if (!out) throw Error(ErrorKind::io, "failed writing '" + path + "'");
}

// Metro-level series: the cases file, aggregated through the metro map when one is given.
inline std::vector<CaseSeries> load_metro_series(const RunConfig& cfg, std::vector<std::string>& warnings) {
  if (cfg.cases.empty()) throw Error(ErrorKind::config, "--cases is required");
  auto in = csv::open_input(cfg.cases);
  auto loaded = load_cases(in);
  warnings.insert(warnings.end(), loaded.warnings.begin(), loaded.warnings.end());
  if (cfg.metro_map.empty()) return std::move(loaded.series);
  auto min = csv::open_input(cfg.metro_map);
  return aggregate_to_metros(loaded.series, load_metro_map(min));
}

// Pads a series to cover `window`: zeros before its first day, last value after its end.
inline CaseSeries cover_window(const CaseSeries& s, DateInterval window, std::vector<std::string>& warnings) {
  if (s.start <= window.first && s.end() >= window.last) return s;
  CaseSeries out{s.region, std::min(s.start, window.first), {}};
  Date last = std::max(s.end(), window.last);
  for (Date d = out.start; d <= last; d += 1) {
    auto v = s.at(d);
    out.counts.push_back(v ? *v : (d < s.start ? 0.0 : s.counts.back()));
  }
  warnings.push_back(s.region + ": padded to cover " + window.first.iso() + ".." + window.last.iso());
  return out;
}

struct SegmentRow {
  std::string metro;
  std::optional<Date> first_case;
  std::optional<Date> protocol_followed;
  std::string diagnostic;
  std::optional<PeriodSet> periods;
};

struct SegmentOutput {
  std::vector<SegmentRow> rows;  // sorted by protocol-followed date, NA last
  std::vector<std::string> warnings;
};

inline SegmentRow segment_one(const RunConfig& cfg, const CaseSeries& raw, std::vector<std::string>& warnings) {
  SegmentRow row;
  row.metro = raw.region;
  row.first_case = raw.first_case();
  if (!row.first_case) {
    row.diagnostic = "no positive counts";
    return row;
  }
  CaseSeries s = cover_window(raw, cfg.window, warnings);
  auto init = initial_periods(cfg.window, cfg.resolved_anchors(), raw.region);
  auto set = optimize_boundaries(s, init, cfg.radius, cfg.min_period);
  row.periods = set;
  if (!set.fitted()) {
    row.diagnostic = "some periods have fewer than 2 positive counts";
    return row;
  }
  auto proto = protocol_followed_date(set, cfg.announcement);
  row.protocol_followed = proto.date;
  row.diagnostic = proto.diagnostic;
  return row;
}

inline SegmentOutput run_segmentation(const RunConfig& cfg) {
  if (cfg.window.empty()) throw Error(ErrorKind::config, "empty window");
  SegmentOutput out;
  auto series = load_metro_series(cfg, out.warnings);
  for (const auto& s : series) out.rows.push_back(segment_one(cfg, s, out.warnings));
  std::stable_sort(out.rows.begin(), out.rows.end(), [](const SegmentRow& a, const SegmentRow& b) {
    if (a.protocol_followed.has_value() != b.protocol_followed.has_value()) return a.protocol_followed.has_value();
    if (a.protocol_followed && *a.protocol_followed != *b.protocol_followed)
      return *a.protocol_followed < *b.protocol_followed;
    return a.metro < b.metro;
  });
  return out;
}

inline void write_protocol_table(std::ostream& out, const std::vector<SegmentRow>& rows) {
  out << "metro,first_case,protocol_followed,diagnostic\n";
  for (const auto& r : rows)
    out << r.metro << ',' << (r.first_case ? r.first_case->iso() : "NA") << ','
        << (r.protocol_followed ? r.protocol_followed->iso() : "NA") << ',' << sanitize(r.diagnostic) << '\n';
}

// periods.csv and protocol.csv
inline SegmentOutput cmd_segment(const RunConfig& cfg) {
  auto res = run_segmentation(cfg);
  std::vector<PeriodSet> sets;
  std::vector<const SegmentRow*> by_name;
  for (const auto& r : res.rows) by_name.push_back(&r);
  std::sort(by_name.begin(), by_name.end(), [](auto* a, auto* b) { return a->metro < b->metro; });
  for (const auto* r : by_name)
    if (r->periods) sets.push_back(*r->periods);
  write_file(out_path(cfg, "periods.csv"), [&](std::ostream& o) { write_periods(o, sets); });
  write_file(out_path(cfg, "protocol.csv"), [&](std::ostream& o) { write_protocol_table(o, res.rows); });
  return res;
}

// Metro series paired with their periods, from --periods when given, else segmentation.
struct MetroInputs {
  std::vector<CaseSeries> series;
  std::vector<PeriodSet> periods;  // same order as series
  std::vector<std::string> warnings;
  std::vector<std::pair<std::string, std::string>> skipped;  // metro, reason
};

inline MetroInputs load_metro_inputs(const RunConfig& cfg) {
  MetroInputs mi;
  auto series = load_metro_series(cfg, mi.warnings);
  std::map<std::string, PeriodSet> from_file;
  if (!cfg.periods.empty()) {
    auto in = csv::open_input(cfg.periods);
    for (auto& p : read_periods(in)) from_file.emplace(p.metro, std::move(p));
  }
  for (const auto& s : series) {
    std::optional<PeriodSet> ps;
    if (!cfg.periods.empty()) {
      auto it = from_file.find(s.region);
      if (it == from_file.end()) {
        mi.skipped.emplace_back(s.region, "not present in periods file");
        continue;
      }
      ps = it->second;
    } else {
      auto row = segment_one(cfg, s, mi.warnings);
      if (!row.periods) {
        mi.skipped.emplace_back(s.region, row.diagnostic);
        continue;
      }
      ps = row.periods;
    }
    mi.series.push_back(cover_window(s, ps->window(), mi.warnings));
    fit_periods(mi.series.back(), *ps);
    mi.periods.push_back(std::move(*ps));
  }
  return mi;
}

inline SearchConfig search_config(const RunConfig& cfg, double s0) {
  auto sc = SearchConfig::defaults_for(s0);
  if (cfg.beta_grid) sc.beta = *cfg.beta_grid;
  if (cfg.gamma_grid) sc.gamma = *cfg.gamma_grid;
  sc.refinement_levels = cfg.refine;
  sc.shared_beta = cfg.shared_beta;
  return sc;
}

inline json model_json(const TuneResult& r, const PeriodSet& ps) {
  json periods = json::array();
  for (std::size_t i = 0; i < period_count; ++i) {
    const auto& p = r.params.per_period[i];
    periods.push_back({{"index", i + 1},
                       {"start", ps.periods[i].start.iso()},
                       {"end", ps.periods[i].end.iso()},
                       {"beta", p.beta},
                       {"gamma", p.gamma},
                       {"k_data", *r.data.k[i]},
                       {"k_sim", *r.sim.k[i]},
                       {"abs_diff", r.report.per_period[i].abs_diff},
                       {"length", r.report.per_period[i].length}});
  }
  return {{"periods", periods},
          {"weighted_error", r.report.weighted_error},
          {"as_percent", r.report.as_percent},
          {"clamp_events", r.trajectory.clamp_events}};
}

struct FitRow {
  std::string metro;
  std::optional<double> only_delayed_pct;
  std::optional<double> reinfected_pct;
  std::string diagnostic;
};

struct FitOutput {
  json report;
  std::vector<FitRow> rows;
  std::vector<std::string> warnings;
};

// Tunes the delayed and reinfection models per metro; fit_report.json and fit_table.csv.
inline FitOutput cmd_fit(const RunConfig& cfg) {
  auto mi = load_metro_inputs(cfg);
  FitOutput out;
  out.warnings = mi.warnings;
  std::unique_ptr<InflowSeries> inflow;
  if (!cfg.inflow.empty()) {
    auto in = csv::open_input(cfg.inflow);
    inflow = std::make_unique<InflowSeries>(read_inflow(in));
  }

  struct Job {
    json entry;
    FitRow row;
  };
  auto run = [&](std::size_t k) {
    const auto& s = mi.series[k];
    const auto& ps = mi.periods[k];
    Job job;
    job.row.metro = s.region;
    job.entry = {{"metro", s.region}};
    try {
      auto init = initial_state(s, ps, cfg.population);
      auto sc = search_config(cfg, init.s);
      auto delayed = tune(Model::delayed, s, ps, sc, cfg.globals, init, inflow.get());
      auto reinf = tune(Model::reinfect, s, ps, sc, cfg.globals, init, inflow.get());
      job.row.only_delayed_pct = delayed.report.as_percent;
      job.row.reinfected_pct = reinf.report.as_percent;
      job.entry["status"] = "ok";
      job.entry["initial_state"] = {{"s", init.s}, {"i", init.i}, {"r", init.r}};
      job.entry["models"] = {{"delayed", model_json(delayed, ps)}, {"reinfect", model_json(reinf, ps)}};
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::insufficient_data && e.kind() != ErrorKind::incomparable) throw;
      job.row.diagnostic = e.what();
      job.entry["status"] = "skipped";
      job.entry["diagnostic"] = e.what();
    }
    return job;
  };

  // Metros are independent; results are collected in input order.
  std::vector<std::future<Job>> jobs;
  for (std::size_t k = 0; k < mi.series.size(); ++k) jobs.push_back(std::async(std::launch::async, run, k));
  json metros = json::array();
  for (auto& j : jobs) {
    auto job = j.get();
    metros.push_back(std::move(job.entry));
    out.rows.push_back(std::move(job.row));
  }
  for (const auto& [metro, why] : mi.skipped) {
    metros.push_back({{"metro", metro}, {"status", "skipped"}, {"diagnostic", why}});
    out.rows.push_back({metro, std::nullopt, std::nullopt, why});
  }

  out.report = {{"globals",
                 {{"tau1", cfg.globals.tau1},
                  {"tau2", cfg.globals.tau2},
                  {"mu", cfg.globals.mu},
                  {"epsilon", cfg.globals.epsilon},
                  {"population", cfg.population}}},
                {"metros", metros}};
  write_file(out_path(cfg, "fit_report.json"), [&](std::ostream& o) { o << out.report.dump(2) << '\n'; });
  write_file(out_path(cfg, "fit_table.csv"), [&](std::ostream& o) {
    o << "metro,only_delayed_pct,reinfected_pct\n";
    for (const auto& r : out.rows)
      o << r.metro << ',' << csv::format(r.only_delayed_pct) << ',' << csv::format(r.reinfected_pct) << '\n';
  });
  return out;
}

// Largest |total(t) - expected(t)| / total(0); expected adds the cumulative inflow
// epsilon * O for the tourism model.
inline double conservation_deviation(const Trajectory& traj, Model model, const PiecewiseParams& params,
                                     const InflowSeries* inflow) {
  const double total0 = traj.states.front().total();
  double expected = total0, worst = 0.0;
  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    if (k > 0 && model == Model::tourism && inflow)
      expected += params.per_period.front().epsilon * inflow->o[k - 1];
    worst = std::max(worst, std::abs(traj.states[k].total() - expected) / total0);
  }
  return worst;
}

struct SimulateOutput {
  std::string metro;
  Trajectory trajectory;
  PiecewiseParams params;
  double max_conservation_deviation = 0.0;
  std::vector<std::string> warnings;
};

// trajectory.csv, plot_sim.csv (day, ln I) and, with cases, plot_data.csv (day, ln count).
inline SimulateOutput cmd_simulate(const RunConfig& cfg) {
  SimulateOutput out;
  std::optional<CaseSeries> series;
  std::optional<PeriodSet> periods;

  if (!cfg.cases.empty()) {
    auto mi = load_metro_inputs(cfg);
    out.warnings = mi.warnings;
    for (std::size_t k = 0; k < mi.series.size(); ++k)
      if (cfg.metro.empty() || mi.series[k].region == cfg.metro) {
        series = mi.series[k];
        periods = mi.periods[k];
        break;
      }
    if (!series) throw Error(ErrorKind::config, "metro '" + cfg.metro + "' not found in the inputs");
  } else if (!cfg.periods.empty()) {
    auto in = csv::open_input(cfg.periods);
    for (auto& p : read_periods(in))
      if (cfg.metro.empty() || p.metro == cfg.metro) {
        periods = std::move(p);
        break;
      }
    if (!periods) throw Error(ErrorKind::config, "metro '" + cfg.metro + "' not found in periods file");
  } else {
    periods = initial_periods(cfg.window, cfg.resolved_anchors(), cfg.metro);
  }
  out.metro = periods->metro;

  std::unique_ptr<InflowSeries> inflow;
  if (!cfg.inflow.empty()) {
    auto in = csv::open_input(cfg.inflow);
    inflow = std::make_unique<InflowSeries>(read_inflow(in));
  }
  if (cfg.model == Model::tourism && !inflow)
    throw Error(ErrorKind::config, "the tourism model needs --inflow");

  SirState init;
  if (!cfg.fit_report.empty()) {
    auto in = csv::open_input(cfg.fit_report);
    json rep;
    try {
      rep = json::parse(in);
    } catch (const json::exception& e) {
      throw Error(ErrorKind::validation, cfg.fit_report + ": " + e.what());
    }
    if (cfg.model != Model::delayed && cfg.model != Model::reinfect)
      throw Error(ErrorKind::config, "fit reports hold delayed and reinfect parameters only");
    const json* entry = nullptr;
    for (const auto& m : rep.at("metros"))
      if (m.at("metro") == out.metro && m.value("status", "") == "ok") entry = &m;
    if (!entry) throw Error(ErrorKind::config, "no fitted parameters for '" + out.metro + "' in fit report");
    const auto& g = rep.at("globals");
    const auto& model = entry->at("models").at(to_string(cfg.model));
    for (std::size_t i = 0; i < period_count; ++i) {
      const auto& p = model.at("periods").at(i);
      out.params.per_period[i] = {p.at("beta").get<double>(), p.at("gamma").get<double>(), g.at("tau1").get<int>(),
                                  g.at("tau2").get<int>(), g.at("mu").get<double>(), g.at("epsilon").get<double>()};
    }
    const auto& st = entry->at("initial_state");
    init = {st.at("s").get<double>(), st.at("i").get<double>(), st.at("r").get<double>()};
  } else {
    if (!cfg.beta || !cfg.gamma) throw Error(ErrorKind::config, "simulate needs --beta and --gamma or --params");
    out.params = PiecewiseParams::uniform(
        {*cfg.beta, *cfg.gamma, cfg.globals.tau1, cfg.globals.tau2, cfg.globals.mu, cfg.globals.epsilon});
    double i0 = cfg.i0 ? *cfg.i0 : series ? initial_state(*series, *periods, cfg.population).i : 1.0;
    init = {cfg.population - i0, i0, 0.0};
  }

  out.trajectory = simulate(cfg.model, out.params, init, *periods, inflow.get());
  out.max_conservation_deviation = conservation_deviation(out.trajectory, cfg.model, out.params, inflow.get());

  write_file(out_path(cfg, "trajectory.csv"), [&](std::ostream& o) { write_trajectory(o, out.trajectory); });
  write_file(out_path(cfg, "plot_sim.csv"), [&](std::ostream& o) {
    o << "day,log_i\n";
    for (std::size_t k = 0; k < out.trajectory.states.size(); ++k) {
      double v = out.trajectory.states[k].i;
      o << k << ',' << (v > 0.0 ? csv::format(std::log(v)) : std::string(csv::na)) << '\n';
    }
  });
  if (series)
    write_file(out_path(cfg, "plot_data.csv"), [&](std::ostream& o) {
      o << "day,log_count\n";
      const Date first = periods->window().first;
      for (Date d = first; d <= periods->window().last; d += 1) {
        auto v = series->at(d);
        o << (d - first) << ',' << (v && *v > 0.0 ? csv::format(std::log(*v)) : std::string(csv::na)) << '\n';
      }
    });
  return out;
}

inline json report_json(const CorrelationReport& rep) {
  auto cells = [](const std::vector<ReportCell>& v) {
    json a = json::array();
    for (const auto& c : v) {
      json j = {{"row", c.row}, {"column", c.column}, {"n", c.n}};
      j["value"] = c.value ? json(*c.value) : json("NA");
      if (c.reason != NaReason::none) j["reason"] = to_string(c.reason);
      a.push_back(std::move(j));
    }
    return a;
  };
  return {{"study", rep.study},
          {"p_values", cells(rep.p_values)},
          {"r_squared", cells(rep.r_squared)},
          {"diagnostics", rep.diagnostics}};
}

struct CorrelateOutput {
  std::optional<CorrelationReport> demographics;
  std::vector<CorrelationReport> weather;  // type, high-temp, low-temp
  std::vector<std::string> warnings;
};

// table3_demographics.csv, table4_weather_type.csv, table5_high_temp.csv,
// table6_low_temp.csv and correlate_report.json. NA cells are data, not failures.
inline CorrelateOutput cmd_correlate(const RunConfig& cfg) {
  bool want_demo = cfg.study == "demographics" || cfg.study == "all" || (cfg.study == "auto" && !cfg.demographics.empty());
  bool want_weather = cfg.study == "weather" || cfg.study == "all" || (cfg.study == "auto" && !cfg.weather.empty());
  if (cfg.study != "auto" && cfg.study != "all" && cfg.study != "demographics" && cfg.study != "weather")
    throw Error(ErrorKind::config, "unknown study '" + cfg.study + "'");
  if (!want_demo && !want_weather) throw Error(ErrorKind::config, "correlate needs --demographics and/or --weather");
  if (want_demo && cfg.demographics.empty()) throw Error(ErrorKind::config, "demographic study needs --demographics");
  if (want_weather && cfg.weather.empty()) throw Error(ErrorKind::config, "weather study needs --weather");

  CorrelateOutput out;
  auto mi = load_metro_inputs(cfg);
  out.warnings = mi.warnings;
  json doc = json::object();

  if (want_demo) {
    auto in = csv::open_input(cfg.demographics);
    auto demo = load_demographics(in);
    std::map<std::string, double> growth;
    std::vector<std::string> notes;
    for (std::size_t k = 0; k < mi.series.size(); ++k) {
      auto rates = data_growth_rates(mi.series[k], mi.periods[k]);
      if (!rates.complete()) {
        notes.push_back(mi.series[k].region + ": growth rate NA, excluded");
        continue;
      }
      growth[mi.series[k].region] = weighted_avg_growth(rates, mi.periods[k]);
    }
    auto rep = demographic_study(demo, growth);
    rep.diagnostics.insert(rep.diagnostics.begin(), notes.begin(), notes.end());
    write_file(out_path(cfg, "table3_demographics.csv"), [&](std::ostream& o) { write_demographic_report(o, rep); });
    doc["demographics"] = report_json(rep);
    out.demographics = std::move(rep);
  }

  if (want_weather) {
    auto in = csv::open_input(cfg.weather);
    auto weather = load_weather(in);
    const std::array<std::pair<WeatherMode, const char*>, 3> modes{{{WeatherMode::type, "table4_weather_type.csv"},
                                                                    {WeatherMode::high_temp, "table5_high_temp.csv"},
                                                                    {WeatherMode::low_temp, "table6_low_temp.csv"}}};
    for (const auto& [mode, file] : modes) {
      CorrelationReport all;
      all.study = std::string("weather-") + to_string(mode);
      for (std::size_t k = 0; k < mi.series.size(); ++k)
        append(all, weather_study(weather, mi.series[k], mi.periods[k], mode));
      write_file(out_path(cfg, file), [&](std::ostream& o) { write_weather_report(o, all); });
      doc[all.study] = report_json(all);
      out.weather.push_back(std::move(all));
    }
  }
  write_file(out_path(cfg, "correlate_report.json"), [&](std::ostream& o) { o << doc.dump(2) << '\n'; });
  return out;
}

struct FixtureOutput {
  fixtures::Dataset dataset;
  std::vector<std::string> files;
};

// Writes a synthetic data set plus its ground truth.
inline FixtureOutput cmd_gen_fixtures(const RunConfig& cfg) {
  fixtures::Config fc;
  fc.seed = cfg.seed;
  fc.metros = cfg.fixture_metros;
  fc.population = cfg.population;
  fc.window = cfg.window;
  fc.anchors = cfg.resolved_anchors();
  fc.globals = cfg.globals;
  if (fc.metros < 1) throw Error(ErrorKind::config, "need at least one fixture metro");
  FixtureOutput out;
  out.dataset = fixtures::generate(fc);
  const auto& ds = out.dataset;
  auto emit = [&](const std::string& name, const std::function<void(std::ostream&)>& body) {
    write_file(out_path(cfg, name), body);
    out.files.push_back(name);
  };
  emit("cases.csv", [&](std::ostream& o) { write_cases(o, ds.counties); });
  emit("metro_map.csv", [&](std::ostream& o) { write_metro_map(o, ds.metro_map); });
  emit("periods_truth.csv", [&](std::ostream& o) { write_periods(o, ds.periods); });
  emit("demographics.csv", [&](std::ostream& o) { write_demographics(o, ds.demographics); });
  emit("weather.csv", [&](std::ostream& o) { write_weather(o, ds.weather); });
  emit("inflow.csv", [&](std::ostream& o) { write_inflow(o, ds.inflow); });
  emit("truth.json", [&](std::ostream& o) {
    json metros = json::array();
    for (const auto& t : ds.truth) {
      json periods = json::array();
      for (std::size_t i = 0; i < period_count; ++i)
        periods.push_back({{"beta", t.params.per_period[i].beta},
                           {"gamma", t.params.per_period[i].gamma},
                           {"beta_index", t.beta_index[i]},
                           {"gamma_index", t.gamma_index[i]}});
      metros.push_back({{"metro", t.metro},
                        {"counties", t.counties},
                        {"initial_state", {{"s", t.init.s}, {"i", t.init.i}, {"r", t.init.r}}},
                        {"weighted_growth", t.weighted_growth},
                        {"periods", periods}});
    }
    json doc = {{"seed", fc.seed},
                {"model", "reinfect"},
                {"population", fc.population},
                {"globals", {{"tau1", fc.globals.tau1}, {"tau2", fc.globals.tau2}, {"mu", fc.globals.mu}, {"epsilon", fc.globals.epsilon}}},
                {"metros", metros}};
    o << doc.dump(2) << '\n';
  });
  return out;
}

}  // namespace epigrowth::pipeline
