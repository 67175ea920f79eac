#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "epigrowth/error.hpp"
#include "epigrowth/growth.hpp"
#include "epigrowth/regress.hpp"
#include "epigrowth/segment.hpp"
#include "epigrowth/sir.hpp"
#include "epigrowth/timeseries.hpp"

namespace epigrowth {

// Per-period slope of ln(count) on positive-count days.
inline GrowthRates data_growth_rates(const CaseSeries& series, const PeriodSet& periods) {
  GrowthRates out;
  out.source = RateSource::data;
  detail::LogWindow lw(series, periods.window());
  for (std::size_t i = 0; i < period_count; ++i) {
    const auto& p = periods.periods[i];
    auto pts = lw.slice(p.start, p.end);
    out.samples[i] = pts.size();
    if (pts.size() < 2) {
      out.diagnostics.push_back(series.region + " period " + std::to_string(i + 1) +
                                ": fewer than 2 positive counts");
      continue;
    }
    out.k[i] = fit_simple(pts).slope;
  }
  return out;
}

// sum |sim_i - data_i| * len_i / sum len_i
inline double weighted_discrepancy(std::span<const double> sim, std::span<const double> data,
                                   std::span<const double> lengths) {
  if (sim.size() != data.size() || sim.size() != lengths.size() || sim.empty())
    throw Error(ErrorKind::shape, "slope and length vectors must share a non-zero length");
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < sim.size(); ++i) {
    if (!(lengths[i] > 0.0)) throw Error(ErrorKind::validation, "period lengths must be positive");
    num += std::abs(sim[i] - data[i]) * lengths[i];
    den += lengths[i];
  }
  return num / den;
}

struct DiscrepancyReport {
  struct Entry {
    double abs_diff = 0.0;  // 1/day
    long length = 0;        // days
  };
  std::array<Entry, period_count> per_period{};
  double weighted_error = 0.0;  // 1/day
  double as_percent = 0.0;      // 100 * weighted_error
};

inline DiscrepancyReport discrepancy(const GrowthRates& sim, const GrowthRates& data,
                                     const PeriodSet& periods) {
  std::array<double, period_count> ks{}, kd{}, len{};
  DiscrepancyReport rep;
  for (std::size_t i = 0; i < period_count; ++i) {
    if (!sim.k[i] || !data.k[i])
      throw Error(ErrorKind::incomparable, periods.metro + " period " + std::to_string(i + 1) + ": " +
                                               (sim.k[i] ? "data" : "simulated") + " growth rate is NA");
    ks[i] = *sim.k[i];
    kd[i] = *data.k[i];
    len[i] = static_cast<double>(periods.periods[i].length());
    rep.per_period[i] = {std::abs(ks[i] - kd[i]), periods.periods[i].length()};
  }
  rep.weighted_error = weighted_discrepancy(ks, kd, len);
  rep.as_percent = 100.0 * rep.weighted_error;
  return rep;
}

// Evenly spaced values lo, lo + resolution, ..., <= hi.
struct GridAxis {
  double lo = 0.0;
  double hi = 0.0;
  double resolution = 1.0;

  std::size_t points() const {
    return static_cast<std::size_t>(std::floor((hi - lo) / resolution + 1e-9)) + 1;
  }
  double value(std::size_t k) const { return std::min(hi, lo + static_cast<double>(k) * resolution); }

  void validate(const char* name) const {
    if (!std::isfinite(lo) || !std::isfinite(hi) || !std::isfinite(resolution) || lo < 0.0 || hi < lo ||
        !(resolution > 0.0))
      throw Error(ErrorKind::config, std::string(name) + " grid is empty or invalid");
  }
};

struct SearchConfig {
  GridAxis beta;
  GridAxis gamma{0.0, 1.0, 0.01};
  int refinement_levels = 3;
  // One beta for all periods, chosen while tuning period 1.
  bool shared_beta = false;

  // beta * s0 spans [0, 1] per day; gamma spans [0, 1] per day; 101 points each.
  static SearchConfig defaults_for(double s0) {
    SearchConfig cfg;
    double top = s0 > 0.0 ? 1.0 / s0 : 1.0;
    cfg.beta = {0.0, top, top / 100.0};
    return cfg;
  }

  void validate() const {
    beta.validate("beta");
    gamma.validate("gamma");
    if (refinement_levels < 0) throw Error(ErrorKind::config, "refinement levels must be >= 0");
  }
};

struct TuneGlobals {
  int tau1 = 5;
  int tau2 = 14;
  double mu = 0.0;
  double epsilon = 0.0;
};

struct TuneResult {
  PiecewiseParams params;
  DiscrepancyReport report;
  GrowthRates data;
  GrowthRates sim;
  Trajectory trajectory;
  // Smallest |k_sim - k_data| seen per period over every grid evaluation.
  std::array<double, period_count> best_grid_error{};
  std::size_t evaluations = 0;
};

// I0 is the count on the first window day, or one person if that count is zero.
inline SirState initial_state(const CaseSeries& series, const PeriodSet& periods, double population) {
  double i0 = series.at(periods.window().first).value_or(0.0);
  if (!(i0 > 0.0)) i0 = 1.0;
  if (!(population > i0))
    throw Error(ErrorKind::config, series.region + ": population must exceed the initial infected count");
  return {population - i0, i0, 0.0};
}

namespace detail {

struct Candidate {
  double err = std::numeric_limits<double>::infinity();
  double beta = 0.0;
  double gamma = 0.0;

  // Smaller error, then smaller beta, then smaller gamma.
  bool better_than(const Candidate& o) const {
    if (err != o.err) return err < o.err;
    if (beta != o.beta) return beta < o.beta;
    return gamma < o.gamma;
  }
};

// Axis values for refinement `level` around `center`: spacing shrinks tenfold per level
// and the span shrinks with it, clipped to the original axis.
inline std::vector<double> axis_values(const GridAxis& axis, int level, std::optional<double> center) {
  std::vector<double> out;
  if (level == 0 || !center) {
    for (std::size_t k = 0; k < axis.points(); ++k) out.push_back(axis.value(k));
    return out;
  }
  double shrink = std::pow(10.0, level);
  double res = axis.resolution / shrink;
  auto half = static_cast<long>((axis.points() - 1) / 2);
  for (long m = -half; m <= half; ++m) {
    double v = *center + static_cast<double>(m) * res;
    if (v >= axis.lo && v <= axis.hi) out.push_back(v);
  }
  return out;
}

// Slope of ln I over days >= first_day, with days counted from the window start.
inline std::optional<double> slope_from(const Trajectory& traj, long first_day, std::vector<LogPoint>& buf) {
  buf.clear();
  for (std::size_t k = static_cast<std::size_t>(first_day - traj.t0); k < traj.states.size(); ++k) {
    double v = traj.states[k].i;
    if (v > 0.0) buf.push_back({traj.t0 + static_cast<long>(k), std::log(v)});
  }
  if (buf.size() < 2) return std::nullopt;
  return fit_simple(std::span<const LogPoint>(buf)).slope;
}

}  // namespace detail

// Period-by-period grid search for (beta_i, gamma_i) minimizing |k_sim_i - k_data_i|.
// The simulated state at the end of each tuned period seeds the next one.
inline TuneResult tune(Model model, const CaseSeries& series, const PeriodSet& periods,
                       const SearchConfig& cfg, const TuneGlobals& globals, const SirState& init,
                       const InflowSeries* inflow = nullptr) {
  cfg.validate();
  periods.validate();
  if (model == Model::tourism && inflow == nullptr)
    throw Error(ErrorKind::config, "tourism model requires an inflow series");

  TuneResult res;
  res.data = data_growth_rates(series, periods);
  if (!res.data.complete()) {
    std::string why;
    for (const auto& d : res.data.diagnostics) why += (why.empty() ? "" : "; ") + d;
    throw Error(ErrorKind::insufficient_data, why);
  }

  const Date first = periods.window().first;
  const long max_tau = std::max(globals.tau1, globals.tau2);
  Trajectory base;
  base.states.push_back(init);
  Trajectory scratch;
  std::vector<LogPoint> buf;
  std::optional<double> shared;

  for (std::size_t i = 0; i < period_count; ++i) {
    const auto& period = periods.periods[i];
    const long day0 = period.start - first;
    const long len = period.length();
    const double target = *res.data.k[i];

    // Keep enough history for the delays; lag reads before t0 still resolve to t0.
    const auto keep = static_cast<std::size_t>(std::min<long>(static_cast<long>(base.states.size()), max_tau + 1));
    const long tail_origin = static_cast<long>(base.states.size() - keep);

    auto evaluate = [&](double beta, double gamma) {
      SirParams p{beta, gamma, globals.tau1, globals.tau2, globals.mu, globals.epsilon};
      scratch.t0 = tail_origin;
      scratch.states.assign(base.states.end() - static_cast<long>(keep), base.states.end());
      scratch.clamp_events = 0;
      advance(scratch, model, p, len - 1, inflow);
      ++res.evaluations;
      detail::Candidate c;
      c.beta = beta;
      c.gamma = gamma;
      if (auto k = detail::slope_from(scratch, day0, buf)) c.err = std::abs(*k - target);
      return c;
    };

    GridAxis beta_axis = cfg.beta;
    if (cfg.shared_beta && shared) beta_axis = {*shared, *shared, 1.0};

    detail::Candidate best;
    bool have = false;
    for (int level = 0; level <= cfg.refinement_levels; ++level) {
      auto betas = detail::axis_values(beta_axis, level, have ? std::optional(best.beta) : std::nullopt);
      auto gammas = detail::axis_values(cfg.gamma, level, have ? std::optional(best.gamma) : std::nullopt);
      if (betas.empty() || gammas.empty()) throw Error(ErrorKind::config, "empty feasible grid");
      for (double b : betas)
        for (double g : gammas) {
          auto c = evaluate(b, g);
          if (!have || c.better_than(best)) {
            best = c;
            have = true;
          }
        }
    }
    if (cfg.shared_beta && !shared) shared = best.beta;

    res.best_grid_error[i] = best.err;
    SirParams chosen{best.beta, best.gamma, globals.tau1, globals.tau2, globals.mu, globals.epsilon};
    res.params.per_period[i] = chosen;
    long steps = len - (i + 1 == period_count ? 1 : 0);
    advance(base, model, chosen, steps, inflow);
  }

  res.trajectory = simulate(model, res.params, init, periods, inflow);
  res.sim = simulated_growth_rates(res.trajectory, periods);
  res.report = discrepancy(res.sim, res.data, periods);
  return res;
}

}  // namespace epigrowth
