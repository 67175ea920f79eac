#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "epigrowth/csv.hpp"
#include "epigrowth/error.hpp"
#include "epigrowth/growth.hpp"
#include "epigrowth/regress.hpp"
#include "epigrowth/segment.hpp"

namespace epigrowth {

enum class Model { original, delayed, reinfect, tourism };

inline const char* to_string(Model m) {
  switch (m) {
    case Model::original: return "original";
    case Model::delayed: return "delayed";
    case Model::reinfect: return "reinfect";
    case Model::tourism: return "tourism";
  }
  return "?";
}

inline Model parse_model(std::string_view s) {
  if (s == "original") return Model::original;
  if (s == "delayed") return Model::delayed;
  if (s == "reinfect") return Model::reinfect;
  if (s == "tourism") return Model::tourism;
  throw Error(ErrorKind::config, "unknown model '" + std::string(s) + "'");
}

// beta: per person per day. gamma, mu, epsilon: per day. Delays in whole days.
struct SirParams {
  double beta = 0.0;
  double gamma = 0.0;
  int tau1 = 0;
  int tau2 = 0;
  double mu = 0.0;
  double epsilon = 0.0;

  void validate() const {
    auto ok = [](double v) { return std::isfinite(v) && v >= 0.0; };
    if (!ok(beta) || !ok(gamma) || !ok(mu) || !ok(epsilon) || tau1 < 0 || tau2 < 0)
      throw Error(ErrorKind::validation, "SIR parameters must be finite and non-negative");
  }

  bool operator==(const SirParams&) const = default;
};

struct SirState {
  double s = 0.0;
  double i = 0.0;
  double r = 0.0;

  double total() const { return s + i + r; }
  bool operator==(const SirState&) const = default;
};

// One state per day starting at day index t0.
struct Trajectory {
  long t0 = 0;
  std::vector<SirState> states;
  std::size_t clamp_events = 0;
};

// beta and gamma per period; tau1, tau2, mu, epsilon shared by all periods.
struct PiecewiseParams {
  std::array<SirParams, period_count> per_period{};

  static PiecewiseParams uniform(const SirParams& p) {
    PiecewiseParams out;
    out.per_period.fill(p);
    return out;
  }

  void validate() const {
    const auto& g = per_period.front();
    for (const auto& p : per_period) {
      p.validate();
      if (p.tau1 != g.tau1 || p.tau2 != g.tau2 || p.mu != g.mu || p.epsilon != g.epsilon)
        throw Error(ErrorKind::validation, "tau1, tau2, mu and epsilon must be shared across periods");
    }
  }
};

// External susceptible inflow O(t), persons/day, indexed from the first simulated day.
struct InflowSeries {
  std::vector<double> o;

  // Expands one constant per period into a daily series over the period window.
  static InflowSeries from_period_constants(const PeriodSet& periods,
                                            const std::array<double, period_count>& per_period) {
    InflowSeries out;
    for (std::size_t i = 0; i < period_count; ++i)
      out.o.insert(out.o.end(), static_cast<std::size_t>(periods.periods[i].length()), per_period[i]);
    return out;
  }
};

// Shared explicit Euler update with unit step. Every model variant routes through
// here so that zeroed-out terms reproduce the simpler variants bit for bit.
inline SirState euler_step(const SirState& now, double i_infect, double i_remove,
                           const SirParams& p, double mu, double source) {
  double infect = p.beta * i_infect * now.s;
  double remove = p.gamma * i_remove;
  double back = mu * now.r;
  return {now.s - infect + back + source, now.i + infect - remove, now.r + remove - back};
}

namespace detail {

// I(t - tau) from the stored history; before the first stored day, I(t0) is used.
inline double lagged_i(std::span<const SirState> history, int tau) {
  auto n = static_cast<long>(history.size());
  long idx = std::max(0L, n - 1 - tau);
  return history[static_cast<std::size_t>(idx)].i;
}

inline void require_history(std::span<const SirState> history) {
  if (history.empty()) throw Error(ErrorKind::state, "delayed step needs a non-empty history");
}

}  // namespace detail

inline SirState step_original(const SirState& state, const SirParams& p) {
  return euler_step(state, state.i, state.i, p, 0.0, 0.0);
}

inline SirState step_delayed(std::span<const SirState> history, const SirParams& p) {
  detail::require_history(history);
  return euler_step(history.back(), detail::lagged_i(history, p.tau1), detail::lagged_i(history, p.tau2),
                    p, 0.0, 0.0);
}

inline SirState step_reinfect(std::span<const SirState> history, const SirParams& p) {
  detail::require_history(history);
  return euler_step(history.back(), detail::lagged_i(history, p.tau1), detail::lagged_i(history, p.tau2),
                    p, p.mu, 0.0);
}

inline SirState step_tourism(std::span<const SirState> history, const SirParams& p, double inflow) {
  detail::require_history(history);
  if (!(inflow >= 0.0)) throw Error(ErrorKind::validation, "inflow must be non-negative");
  return euler_step(history.back(), detail::lagged_i(history, p.tau1), detail::lagged_i(history, p.tau2),
                    p, 0.0, p.epsilon * inflow);
}

// Zeroes negative components; returns how many were clamped.
inline std::size_t clamp_non_negative(SirState& s) {
  std::size_t n = 0;
  for (double* v : {&s.s, &s.i, &s.r})
    if (*v < 0.0) {
      *v = 0.0;
      ++n;
    }
  return n;
}

// Appends `steps` daily states to `traj` using the chosen variant. The inflow entry
// for a state is read at its day index, t0 + position.
inline void advance(Trajectory& traj, Model model, const SirParams& p, long steps,
                    const InflowSeries* inflow = nullptr) {
  if (traj.states.empty()) throw Error(ErrorKind::state, "trajectory has no initial state");
  if (model == Model::tourism && inflow == nullptr)
    throw Error(ErrorKind::config, "tourism model requires an inflow series");
  traj.states.reserve(traj.states.size() + static_cast<std::size_t>(std::max(0L, steps)));
  for (long k = 0; k < steps; ++k) {
    std::span<const SirState> hist(traj.states);
    SirState next;
    switch (model) {
      case Model::original: next = step_original(hist.back(), p); break;
      case Model::delayed: next = step_delayed(hist, p); break;
      case Model::reinfect: next = step_reinfect(hist, p); break;
      case Model::tourism: {
        auto day = static_cast<std::size_t>(traj.t0) + traj.states.size() - 1;
        if (day >= inflow->o.size())
          throw Error(ErrorKind::config, "inflow series ends before day " + std::to_string(day));
        next = step_tourism(hist, p, inflow->o[day]);
        break;
      }
    }
    traj.clamp_events += clamp_non_negative(next);
    traj.states.push_back(next);
  }
}

// Daily simulation across the period window. Parameters switch at period starts;
// the state carries over unchanged.
inline Trajectory simulate(Model model, const PiecewiseParams& params, const SirState& init,
                           const PeriodSet& periods, const InflowSeries* inflow = nullptr) {
  params.validate();
  periods.validate();
  for (double v : {init.s, init.i, init.r})
    if (!std::isfinite(v) || v < 0.0)
      throw Error(ErrorKind::validation, "initial state must be finite and non-negative");
  if (model == Model::tourism) {
    if (inflow == nullptr) throw Error(ErrorKind::config, "tourism model requires an inflow series");
    for (double o : inflow->o)
      if (!(o >= 0.0)) throw Error(ErrorKind::validation, "inflow must be non-negative");
  }

  Trajectory traj;
  traj.states.push_back(init);
  for (std::size_t i = 0; i < period_count; ++i) {
    long steps = periods.periods[i].length() - (i + 1 == period_count ? 1 : 0);
    advance(traj, model, params.per_period[i], steps, inflow);
  }
  return traj;
}

// Slope of ln I over each period. Day 0 of the trajectory is the first day of the
// period window.
inline GrowthRates simulated_growth_rates(const Trajectory& traj, const PeriodSet& periods) {
  const Date first = periods.window().first;
  if (static_cast<long>(traj.states.size()) < periods.window().length())
    throw Error(ErrorKind::state, "trajectory shorter than the period window");
  GrowthRates out;
  out.source = RateSource::simulation;
  std::vector<LogPoint> pts;
  for (std::size_t p = 0; p < period_count; ++p) {
    pts.clear();
    for (long d = periods.periods[p].start - first; d <= periods.periods[p].end - first; ++d) {
      double v = traj.states[static_cast<std::size_t>(d)].i;
      if (v > 0.0) pts.push_back({d, std::log(v)});
    }
    out.samples[p] = pts.size();
    if (pts.size() < 2) {
      out.diagnostics.push_back("period " + std::to_string(p + 1) +
                                ": fewer than 2 days with positive simulated I");
      continue;
    }
    out.k[p] = fit_simple(std::span<const LogPoint>(pts)).slope;
  }
  return out;
}

inline void write_trajectory(std::ostream& out, const Trajectory& traj) {
  out << "day,s,i,r\n";
  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    const auto& st = traj.states[k];
    out << traj.t0 + static_cast<long>(k) << ',' << csv::format(st.s) << ',' << csv::format(st.i) << ','
        << csv::format(st.r) << '\n';
  }
}

inline Trajectory read_trajectory(std::istream& in) {
  auto table = csv::read_table(in);
  csv::expect_header(table, {"day", "s", "i", "r"});
  Trajectory traj;
  for (const auto& row : table.rows) {
    csv::expect_width(row, 4);
    long day = csv::parse_long(row, 0, "day");
    if (traj.states.empty())
      traj.t0 = day;
    else if (day != traj.t0 + static_cast<long>(traj.states.size()))
      throw ParseError(row.line, "days must be consecutive");
    traj.states.push_back(
        {csv::parse_double(row, 1, "s"), csv::parse_double(row, 2, "i"), csv::parse_double(row, 3, "r")});
  }
  if (traj.states.empty()) throw Error(ErrorKind::validation, "trajectory file has no rows");
  return traj;
}

inline void write_inflow(std::ostream& out, const InflowSeries& inflow) {
  out << "day,o\n";
  for (std::size_t d = 0; d < inflow.o.size(); ++d) out << d << ',' << csv::format(inflow.o[d]) << '\n';
}

inline InflowSeries read_inflow(std::istream& in) {
  auto table = csv::read_table(in);
  csv::expect_header(table, {"day", "o"});
  InflowSeries out;
  for (const auto& row : table.rows) {
    csv::expect_width(row, 2);
    if (csv::parse_long(row, 0, "day") != static_cast<long>(out.o.size()))
      throw ParseError(row.line, "inflow days must start at 0 and be consecutive");
    double o = csv::parse_double(row, 1, "o");
    if (o < 0.0) throw Error(ErrorKind::validation, "line " + std::to_string(row.line) + ": negative inflow");
    out.o.push_back(o);
  }
  return out;
}

}  // namespace epigrowth
