#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "epigrowth/pipeline.hpp"

using namespace epigrowth;

namespace {

std::array<Date, period_count - 1> parse_anchors(const std::string& text) {
  std::array<Date, period_count - 1> out{};
  auto parts = csv::split(text, ',');
  if (parts.size() != out.size()) throw Error(ErrorKind::config, "--anchors needs four comma-separated dates");
  for (std::size_t i = 0; i < out.size(); ++i) {
    try {
      out[i] = Date::parse(std::string(csv::trim(parts[i])));
    } catch (const Error& e) {
      throw Error(ErrorKind::config, std::string("--anchors: ") + e.what());
    }
  }
  return out;
}

// lo:hi:resolution
GridAxis parse_grid(const std::string& text, const char* name) {
  auto parts = csv::split(text, ':');
  GridAxis g;
  try {
    if (parts.size() != 3) throw std::invalid_argument("shape");
    g = {std::stod(parts[0]), std::stod(parts[1]), std::stod(parts[2])};
  } catch (const std::exception&) {
    throw Error(ErrorKind::config, std::string("--") + name + "-grid expects lo:hi:resolution");
  }
  g.validate(name);
  return g;
}

void print_warnings(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lockdown-period growth analysis of epidemic case counts"};
  app.require_subcommand(1, 1);
  app.set_config("--config", "", "key=value file; command-line flags take precedence");

  pipeline::RunConfig cfg;
  std::string window, anchors, announcement, model = "delayed", beta_grid, gamma_grid;

  app.add_option("--cases", cfg.cases, "daily case CSV (date,region,count)");
  app.add_option("--metro-map", cfg.metro_map, "county to metro CSV (county,metro)");
  app.add_option("--demographics", cfg.demographics, "demographics CSV");
  app.add_option("--weather", cfg.weather, "weather CSV");
  app.add_option("--inflow", cfg.inflow, "susceptible inflow CSV (day,o)");
  app.add_option("--periods", cfg.periods, "periods CSV from a segment run");
  app.add_option("--params", cfg.fit_report, "fit_report.json supplying simulate parameters");
  app.add_option("--metro", cfg.metro, "metro to simulate");
  app.add_option("--study", cfg.study, "correlate: auto, all, demographics or weather");
  app.add_option("--window", window, "analysis window FIRST:LAST");
  app.add_option("--anchors", anchors, "starts of periods 2-5, comma separated");
  app.add_option("--announcement", announcement, "protocol announcement date");
  app.add_option("--radius", cfg.radius, "boundary search radius in days");
  app.add_option("--min-period", cfg.min_period, "minimum period length in days");
  app.add_option("--model", model, "original, delayed, reinfect or tourism");
  app.add_option("--tau1", cfg.globals.tau1, "incubation delay, days");
  app.add_option("--tau2", cfg.globals.tau2, "removal delay, days");
  auto* mu_opt = app.add_option("--mu", cfg.globals.mu, "reinfection rate, per day (gen-fixtures default 0.02)");
  app.add_option("--epsilon", cfg.globals.epsilon, "inflow coefficient");
  app.add_option("--population", cfg.population, "metro population S0 + I0");
  app.add_option("--beta-grid", beta_grid, "beta search axis lo:hi:resolution");
  app.add_option("--gamma-grid", gamma_grid, "gamma search axis lo:hi:resolution");
  app.add_option("--refine", cfg.refine, "grid refinement levels");
  app.add_flag("--shared-beta", cfg.shared_beta, "one beta for all periods");
  app.add_option("--beta", cfg.beta, "simulate: beta for every period");
  app.add_option("--gamma", cfg.gamma, "simulate: gamma for every period");
  app.add_option("--i0", cfg.i0, "simulate: initial infected");
  app.add_option("--out", cfg.out, "output directory");
  app.add_option("--seed", cfg.seed, "fixture seed");
  app.add_option("--fixture-metros", cfg.fixture_metros, "number of fixture metros");

  auto* seg = app.add_subcommand("segment", "optimize lockdown periods and protocol-followed dates");
  auto* fit = app.add_subcommand("fit", "tune delayed and reinfection models per metro");
  auto* sim = app.add_subcommand("simulate", "run one model and write its trajectory");
  auto* cor = app.add_subcommand("correlate", "demographic and weather regressions");
  auto* gen = app.add_subcommand("gen-fixtures", "write a synthetic data set with ground truth");
  for (auto* sub : {seg, fit, sim, cor, gen}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : exit_code(ErrorKind::config);
  }

  try {
    if (!window.empty()) cfg.window = DateInterval::parse(window);
    if (!anchors.empty()) cfg.anchors = parse_anchors(anchors);
    if (!announcement.empty()) {
      try {
        cfg.announcement = Date::parse(announcement);
      } catch (const Error& e) {
        throw Error(ErrorKind::config, std::string("--announcement: ") + e.what());
      }
    }
    cfg.model = parse_model(model);
    if (!beta_grid.empty()) cfg.beta_grid = parse_grid(beta_grid, "beta");
    if (!gamma_grid.empty()) cfg.gamma_grid = parse_grid(gamma_grid, "gamma");

    if (*seg) {
      auto res = pipeline::cmd_segment(cfg);
      print_warnings(res.warnings);
      std::cout << "segmented " << res.rows.size() << " metros\n";
    } else if (*fit) {
      auto res = pipeline::cmd_fit(cfg);
      print_warnings(res.warnings);
      for (const auto& r : res.rows)
        std::cout << r.metro << ": delayed " << csv::format(r.only_delayed_pct) << "%, reinfect "
                  << csv::format(r.reinfected_pct) << "%\n";
    } else if (*sim) {
      auto res = pipeline::cmd_simulate(cfg);
      print_warnings(res.warnings);
      std::cout << "max conservation deviation " << csv::format(res.max_conservation_deviation) << '\n';
      if (res.trajectory.clamp_events > 0) std::cout << "clamped " << res.trajectory.clamp_events << " values\n";
    } else if (*cor) {
      auto res = pipeline::cmd_correlate(cfg);
      print_warnings(res.warnings);
      std::cout << "wrote correlation reports to " << cfg.out << '\n';
    } else if (*gen) {
      if (mu_opt->count() == 0) cfg.globals.mu = fixtures::Config{}.globals.mu;
      auto res = pipeline::cmd_gen_fixtures(cfg);
      for (const auto& f : res.files) std::cout << f << '\n';
    }
  } catch (const Error& e) {
    std::cerr << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
