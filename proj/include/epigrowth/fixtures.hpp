#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "epigrowth/correlate.hpp"
#include "epigrowth/error.hpp"
#include "epigrowth/fit.hpp"
#include "epigrowth/segment.hpp"
#include "epigrowth/sir.hpp"
#include "epigrowth/timeseries.hpp"

// Synthetic data sets with known ground truth.
namespace epigrowth::fixtures {

// mt19937_64 with hand-rolled transforms: std:: distributions differ between
// standard libraries, and fixture files must be reproducible byte for byte.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  long integer(long lo, long hi) { return lo + static_cast<long>(eng_() % static_cast<std::uint64_t>(hi - lo + 1)); }

  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::mt19937_64 eng_;
};

inline std::uint64_t mix(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Continuous piecewise log-linear counts: ln c(d) has slope slopes[j] on segment j,
// segment j + 1 starting at day offset breaks[j]. Each count carries independent
// multiplicative noise exp(sigma * z).
inline CaseSeries piecewise_exponential(std::string region, Date start, long days, double log0,
                                        const std::array<long, period_count - 1>& breaks,
                                        const std::array<double, period_count>& slopes, double sigma,
                                        Rng& rng) {
  CaseSeries s{std::move(region), start, {}};
  double level = log0;
  std::size_t seg = 0;
  for (long d = 0; d < days; ++d) {
    if (d > 0) level += slopes[seg];
    // the slope of segment j applies to the steps after its first day
    while (seg < breaks.size() && d >= breaks[seg]) ++seg;
    double noise = sigma > 0.0 ? sigma * rng.normal() : 0.0;
    s.counts.push_back(std::exp(level + noise));
  }
  return s;
}

struct Config {
  std::uint64_t seed = 1;
  int metros = 11;
  double population = 1e6;
  DateInterval window = SegmentDefaults::window;
  std::array<Date, period_count - 1> anchors = default_anchors();
  TuneGlobals globals{5, 14, 0.02, 0.0};
  long lead_days = 14;  // pre-window ramp so first-case dates differ
};

struct MetroTruth {
  std::string metro;
  std::vector<std::string> counties;
  SirState init;
  PiecewiseParams params;
  std::array<std::size_t, period_count> beta_index{};
  std::array<std::size_t, period_count> gamma_index{};
  double weighted_growth = 0.0;
};

struct Dataset {
  Config config;
  std::vector<CaseSeries> counties;
  MetroMap metro_map;
  std::vector<CaseSeries> metros;  // aggregated, for convenience
  std::vector<PeriodSet> periods;  // generating periods, fitted to the metro data
  std::vector<MetroTruth> truth;
  DemographicTable demographics;
  WeatherTable weather;
  InflowSeries inflow;
};

inline std::string metro_name(int i) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "metro_%02d", i + 1);
  return buf;
}

// Case counts from the reinfection model with per-period (beta, gamma) drawn from the
// default search grid, split across one to three counties per metro; demographics with
// a planted post-graduate effect on the weighted growth rate; daily weather.
inline Dataset generate(const Config& cfg) {
  Dataset ds;
  ds.config = cfg;
  const auto base_periods = initial_periods(cfg.window, cfg.anchors);
  const long lead = cfg.lead_days;
  const Date series_start = cfg.window.first - lead;

  // Target growth bands per period: early surge, slowdown, plateau, decline, rebound.
  const std::array<std::pair<double, double>, period_count> bands{
      {{0.10, 0.22}, {0.02, 0.09}, {-0.02, 0.04}, {-0.05, 0.00}, {0.00, 0.06}}};

  for (int m = 0; m < cfg.metros; ++m) {
    Rng rng(mix(cfg.seed, static_cast<std::uint64_t>(m)));
    MetroTruth t;
    t.metro = metro_name(m);
    double i0 = std::round(rng.uniform(20.0, 120.0));
    t.init = {cfg.population - i0, i0, 0.0};
    const auto grid = SearchConfig::defaults_for(t.init.s);

    // Period by period, redraw (beta, gamma) until the simulated slope lands in the band,
    // nothing is clamped and I stays between one person and a tenth of the population.
    auto admissible = [&](const Trajectory& c, std::size_t p) {
      if (c.clamp_events > 0) return false;
      for (const auto& st : c.states)
        if (st.i < 1.0 || st.i > 0.1 * cfg.population) return false;
      std::vector<LogPoint> pts;
      for (long d = base_periods.periods[p].start - cfg.window.first; d < static_cast<long>(c.states.size()); ++d)
        pts.push_back({d, std::log(c.states[static_cast<std::size_t>(d)].i)});
      double k = fit_simple(std::span<const LogPoint>(pts)).slope;
      return k >= bands[p].first && k <= bands[p].second;
    };
    Trajectory traj;
    for (int attempt = 0;; ++attempt) {
      if (attempt == 100) throw Error(ErrorKind::state, t.metro + ": no admissible fixture parameters");
      traj = Trajectory{0, {t.init}, 0};
      bool ok = true;
      for (std::size_t p = 0; p < period_count && ok; ++p) {
        long steps = base_periods.periods[p].length() - (p + 1 == period_count ? 1 : 0);
        ok = false;
        for (int draw = 0; draw < 500 && !ok; ++draw) {
          long b = rng.integer(5, 60);
          long g = rng.integer(std::max(0L, b - 30), std::min(100L, b + 30));
          SirParams sp{grid.beta.value(static_cast<std::size_t>(b)), grid.gamma.value(static_cast<std::size_t>(g)),
                       cfg.globals.tau1, cfg.globals.tau2, cfg.globals.mu, cfg.globals.epsilon};
          Trajectory c = traj;
          advance(c, Model::reinfect, sp, steps);
          if (!admissible(c, p)) continue;
          traj = std::move(c);
          t.beta_index[p] = static_cast<std::size_t>(b);
          t.gamma_index[p] = static_cast<std::size_t>(g);
          t.params.per_period[p] = sp;
          ok = true;
        }
      }
      if (ok) break;
    }

    // Pre-window ramp down to a first case, then the simulated infected counts.
    CaseSeries metro{t.metro, series_start, {}};
    long first_case = rng.integer(1, lead - 2);
    double ramp = std::log(i0) / static_cast<double>(lead - first_case);
    for (long d = 0; d < lead; ++d)
      metro.counts.push_back(d < first_case ? 0.0
                                            : std::round(std::exp(ramp * static_cast<double>(d - first_case))));
    for (const auto& st : traj.states) metro.counts.push_back(st.i);

    int n_counties = static_cast<int>(rng.integer(1, 3));
    std::vector<double> share;
    double left = 1.0;
    for (int c = 0; c + 1 < n_counties; ++c) {
      double f = std::round(rng.uniform(0.2, 0.5) * left * 100.0) / 100.0;
      share.push_back(f);
      left -= f;
    }
    std::vector<CaseSeries> parts;
    for (int c = 0; c < n_counties; ++c) {
      std::string name = t.metro + "_county_" + std::to_string(c + 1);
      t.counties.push_back(name);
      ds.metro_map.entries[name] = t.metro;
      parts.push_back({name, series_start, std::vector<double>(metro.counts.size(), 0.0)});
    }
    for (std::size_t d = 0; d < metro.counts.size(); ++d) {
      double rest = metro.counts[d];
      for (int c = 0; c + 1 < n_counties; ++c) {
        parts[static_cast<std::size_t>(c)].counts[d] = share[static_cast<std::size_t>(c)] * metro.counts[d];
        rest -= parts[static_cast<std::size_t>(c)].counts[d];
      }
      parts.back().counts[d] = rest;
    }
    for (auto& p : parts) ds.counties.push_back(std::move(p));

    PeriodSet ps = base_periods;
    ps.metro = t.metro;
    fit_periods(metro, ps);
    t.weighted_growth = weighted_avg_growth(data_growth_rates(metro, ps), ps);
    ds.periods.push_back(ps);
    ds.metros.push_back(std::move(metro));
    ds.truth.push_back(std::move(t));
  }
  ds.metros = aggregate_to_metros(ds.counties, ds.metro_map);

  // Demographics. Age, gender and income are compositional (rows add to 100);
  // education lists four attainment levels and leaves out the rest.
  Rng drng(mix(cfg.seed, 1000));
  double lo = ds.truth.front().weighted_growth, hi = lo;
  for (const auto& t : ds.truth) {
    lo = std::min(lo, t.weighted_growth);
    hi = std::max(hi, t.weighted_growth);
  }
  double spread = hi > lo ? hi - lo : 1.0;
  for (const auto& t : ds.truth) {
    auto shares = [&](std::size_t n) {
      std::vector<double> w(n);
      double sum = 0.0;
      for (auto& x : w) sum += (x = drng.uniform(0.5, 1.5));
      double acc = 0.0;
      for (std::size_t i = 0; i + 1 < n; ++i) acc += (w[i] = std::round(1000.0 * w[i] / sum) / 10.0);
      w.back() = std::round((100.0 - acc) * 10.0) / 10.0;
      return w;
    };
    auto age = shares(4);
    const char* age_names[] = {"0-20", "20-50", "50-70", "70-80+"};
    for (std::size_t i = 0; i < 4; ++i) ds.demographics.add(t.metro, "age", age_names[i], age[i]);
    double male = std::round(drng.uniform(47.0, 52.0) * 10.0) / 10.0;
    ds.demographics.add(t.metro, "gender", "male", male);
    ds.demographics.add(t.metro, "gender", "female", std::round((100.0 - male) * 10.0) / 10.0);
    auto income = shares(4);
    const char* income_names[] = {"0-50k", "50-100k", "100-150k", "150-200k+"};
    for (std::size_t i = 0; i < 4; ++i) ds.demographics.add(t.metro, "income", income_names[i], income[i]);
    double planted = 8.0 + 10.0 * (t.weighted_growth - lo) / spread + drng.normal() * 0.2;
    ds.demographics.add(t.metro, "education", "high_school", std::round(drng.uniform(24.0, 32.0) * 10.0) / 10.0);
    ds.demographics.add(t.metro, "education", "some_college", std::round(drng.uniform(18.0, 24.0) * 10.0) / 10.0);
    ds.demographics.add(t.metro, "education", "college", std::round(drng.uniform(16.0, 24.0) * 10.0) / 10.0);
    ds.demographics.add(t.metro, "education", "post_grad", std::round(planted * 100.0) / 100.0);
  }

  // Weather over the full series range. metro_01 sees only sunny days in period 1.
  for (std::size_t m = 0; m < ds.truth.size(); ++m) {
    Rng wrng(mix(cfg.seed, 2000 + m));
    const auto& name = ds.truth[m].metro;
    double offset = wrng.uniform(-4.0, 4.0);
    for (Date d = series_start; d <= cfg.window.last; d += 1) {
      double season = static_cast<double>(d - cfg.window.first) / static_cast<double>(cfg.window.length());
      double high = std::round(72.0 + 18.0 * season + offset + 4.0 * wrng.normal());
      double low = std::round(52.0 + 20.0 * season + offset + 4.0 * wrng.normal());
      std::string type;
      if (m == 0 && d <= base_periods.periods[0].end) {
        type = "sunny";
      } else {
        double u = wrng.uniform();
        type = u < 0.55 ? "sunny" : u < 0.75 ? "cloudy" : u < 0.95 ? "rainy" : "foggy";
      }
      ds.weather.add(name, d, {high, std::min(low, high), type});
    }
  }

  // Spring-break shaped visitor inflow over the window.
  Rng irng(mix(cfg.seed, 3000));
  for (long d = 0; d < cfg.window.length(); ++d) {
    double peak = 4000.0 * std::exp(-std::pow((static_cast<double>(d) - 15.0) / 12.0, 2.0));
    ds.inflow.o.push_back(std::round(500.0 + peak + 100.0 * irng.uniform()));
  }
  return ds;
}

}  // namespace epigrowth::fixtures
