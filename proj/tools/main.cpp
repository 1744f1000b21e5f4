// incdyn command-line front end.
//
//   incdyn simulate  --z Z --out DIR [--seed S]
//   incdyn fit       --in panel.csv --model M --dist D --out DIR [--iters N --burnin B --seed S]
//   incdyn welfare   --in FITDIR --z Z --out DIR [--level L]
//   incdyn dominance --in FITDIR --years A,B --out DIR [--in-b FITDIR] [--relation R] [--grid N] [--range lo:hi]
//   incdyn forecast  --in FITDIR --horizon H --z Z --out DIR [--seed S --level L --grid N]
//   incdyn cv        --in panel.csv --model M --dist D --out DIR [--folds K --iters N --burnin B --seed S]
//   incdyn curves    --in FITDIR --z Z --out DIR [--level L --grid N --years A,B,...]
//
// Every run writes DIR/manifest.json. Exit codes: 0 ok, 2 usage, 3 domain,
// 4 numeric, 5 io, 1 anything else.

#include <Eigen/Core>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "incdyn/incdyn.hpp"

namespace fs = std::filesystem;
using incdyn::io::json;

namespace {

int exit_code(incdyn::ErrorCategory c) {
  switch (c) {
    case incdyn::ErrorCategory::usage: return 2;
    case incdyn::ErrorCategory::domain: return 3;
    case incdyn::ErrorCategory::numeric: return 4;
    case incdyn::ErrorCategory::io: return 5;
  }
  return 1;
}

void report_error(std::string_view category, const std::string& message) {
  json j{{"error", {{"category", std::string(category)}, {"message", message}}}};
  std::cerr << j.dump() << "\n";
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(',', start);
    std::string item = s.substr(start, pos == std::string::npos ? std::string::npos : pos - start);
    if (item.empty()) throw incdyn::UsageError("empty item in list '" + s + "'");
    out.push_back(item);
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

std::pair<double, double> parse_range(const std::string& s) {
  const auto colon = s.find(':');
  if (colon == std::string::npos) throw incdyn::UsageError("--range expects lo:hi, got '" + s + "'");
  const auto lo = incdyn::io::detail::parse_double(s.substr(0, colon));
  const auto hi = incdyn::io::detail::parse_double(s.substr(colon + 1));
  if (!lo || !hi) throw incdyn::UsageError("--range expects two numbers lo:hi, got '" + s + "'");
  if (!(*lo > 0.0 && *hi < 1.0 && *lo < *hi)) throw incdyn::UsageError("--range needs 0 < lo < hi < 1");
  return {*lo, *hi};
}

json versions() {
  return json{{"incdyn", INCDYN_VERSION},
              {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                            std::to_string(EIGEN_MINOR_VERSION)},
              {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                    std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                    std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
              {"compiler", __VERSION__}};
}

/// Manifest accumulated during a run and written whether or not the run
/// succeeds once the configuration has been validated.
struct Manifest {
  std::string command;
  json config = json::object();
  std::vector<std::string> outputs;
  fs::path dir;

  void write(const std::optional<std::pair<std::string, std::string>>& error) const {
    json j;
    j["command"] = command;
    j["versions"] = versions();
    j["config"] = config;
    j["outputs"] = outputs;
    if (error) {
      j["status"] = "error";
      j["error"] = {{"category", error->first}, {"message", error->second}};
    } else {
      j["status"] = "ok";
    }
    incdyn::io::atomic_write(dir / "manifest.json", incdyn::io::json_text(j));
  }

  void emit(const std::string& name, const std::string& content) {
    incdyn::io::atomic_write(dir / name, content);
    outputs.push_back(name);
  }
};

// ---- option storage ----

struct Options {
  std::string in, in_b, out;
  std::string model, dist = "dagum";
  std::size_t iters = 10000, burnin = 5000;
  std::uint64_t seed = 1;
  std::optional<double> z;
  std::optional<double> level;
  std::size_t grid = 999;
  std::string range;
  std::size_t folds = 10;
  std::size_t horizon = 4;
  std::string years;
  std::string relation = "all";
  std::size_t periods = 25, per_year = 250;
  std::size_t threads = 0;
  bool oracle = false;
};

incdyn::FitConfig fit_config(const Options& o) {
  incdyn::FitConfig c;
  c.iterations = o.iters;
  c.burn_in = o.burnin;
  c.seed = o.seed;
  c.validate();
  return c;
}

incdyn::PovertyLine poverty_line(const Options& o) {
  if (!o.z) throw incdyn::UsageError("--z (poverty line) is required");
  if (!(*o.z > 0.0)) throw incdyn::UsageError("--z must be positive");
  return incdyn::PovertyLine(*o.z);
}

double credible_level(const Options& o, double fallback) {
  const double l = o.level.value_or(fallback);
  if (!(l > 0.0 && l < 1.0)) throw incdyn::UsageError("--level must lie in (0,1)");
  return l;
}

incdyn::UGrid u_grid(const Options& o) {
  if (o.grid == 0) throw incdyn::UsageError("--grid must be positive");
  auto g = incdyn::UGrid::uniform(o.grid);
  if (!o.range.empty()) {
    const auto [lo, hi] = parse_range(o.range);
    g = g.restrict(lo, hi);
  }
  return g;
}

// ---- commands. Each validates its configuration into `m.config` and
// returns a callable performing the work. ----

using Work = std::function<void(Manifest&)>;

Work cmd_simulate(const Options& o, Manifest& m) {
  incdyn::DgpConfig cfg;
  cfg.seed = o.seed;
  cfg.years = o.periods;
  cfg.per_year = o.per_year;
  cfg.validate();
  const auto z = poverty_line(o);
  m.config = {{"seed", cfg.seed},          {"periods", cfg.years},
              {"per_year", cfg.per_year},  {"initial", cfg.initial},
              {"innovation_sd", cfg.innovation_sd}, {"first_year", cfg.first_year},
              {"z", z.value()}};
  return [cfg, z](Manifest& m) {
    const auto sim = incdyn::simulate_dgp(cfg, z);
    m.emit("panel.csv", incdyn::io::panel_csv(sim.panel));
    m.emit("truth.csv", incdyn::io::truth_csv(sim));
  };
}

Work cmd_fit(const Options& o, Manifest& m) {
  if (o.model.empty()) throw incdyn::UsageError("--model is required");
  const auto model = incdyn::parse_model(o.model);
  const auto kind = incdyn::parse_distribution(o.dist);
  const auto cfg = fit_config(o);
  m.config = {{"in", o.in}, {"model", std::string(incdyn::to_string(model))},
              {"dist", std::string(incdyn::to_string(kind))}, {"fit", incdyn::io::fit_config_json(cfg)}};
  return [o, model, kind, cfg](Manifest& m) {
    const auto panel = incdyn::io::ingest(o.in);
    const auto draws = incdyn::fit(panel, kind, model, cfg);
    incdyn::io::write_drawset(m.dir, draws);
    m.outputs.push_back("draws.csv");
    m.outputs.push_back("draws.json");
  };
}

Work cmd_welfare(const Options& o, Manifest& m) {
  const auto z = poverty_line(o);
  const double level = credible_level(o, 0.95);
  m.config = {{"in", o.in}, {"z", z.value()}, {"level", level}};
  return [o, z, level](Manifest& m) {
    const auto draws = incdyn::io::read_drawset(o.in);
    const auto series = incdyn::welfare_series(draws, z, level);
    m.emit("welfare.csv", incdyn::io::welfare_csv(series));
  };
}

Work cmd_dominance(const Options& o, Manifest& m) {
  const auto grid = u_grid(o);
  const auto years = split_list(o.years);
  if (years.size() != 2) throw incdyn::UsageError("--years expects two labels A,B");
  std::vector<incdyn::Relation> relations;
  if (o.relation == "all") {
    relations = {incdyn::Relation::FSD, incdyn::Relation::GLD, incdyn::Relation::LD};
  } else {
    for (const auto& r : split_list(o.relation)) relations.push_back(incdyn::parse_relation(r));
  }
  json rel = json::array();
  for (auto r : relations) rel.push_back(std::string(incdyn::to_string(r)));
  m.config = {{"in", o.in},
              {"in_b", o.in_b.empty() ? o.in : o.in_b},
              {"year_a", years[0]},
              {"year_b", years[1]},
              {"relations", rel},
              {"grid", o.grid},
              {"range", o.range.empty() ? json(nullptr) : json(o.range)}};
  return [o, grid, years, relations](Manifest& m) {
    const auto a = incdyn::io::read_drawset(o.in);
    const auto b = o.in_b.empty() ? a : incdyn::io::read_drawset(o.in_b);
    const auto ta = incdyn::year_index(a, years[0]);
    const auto tb = incdyn::year_index(b, years[1]);
    json reports = json::array();
    std::vector<incdyn::DominanceReport> all;
    for (auto r : relations) {
      auto rep = incdyn::dominance_prob(a, ta, b, tb, r, grid);
      reports.push_back(incdyn::io::dominance_json(rep, years[0], years[1]));
      all.push_back(std::move(rep));
    }
    m.emit("dominance.json", incdyn::io::json_text(json{{"year_a", years[0]}, {"year_b", years[1]}, {"reports", reports}}));
    m.emit("dominance_curve.csv", incdyn::io::dominance_curve_csv(all));
  };
}

Work cmd_forecast(const Options& o, Manifest& m) {
  const auto z = poverty_line(o);
  const double level = credible_level(o, 0.95);
  const auto grid = u_grid(o);
  m.config = {{"in", o.in}, {"horizon", o.horizon}, {"seed", o.seed}, {"z", z.value()}, {"level", level},
              {"grid", o.grid}};
  return [o, z, level, grid](Manifest& m) {
    const auto draws = incdyn::io::read_drawset(o.in);
    incdyn::Rng rng(o.seed);
    const auto fc = incdyn::forecast_states(draws, o.horizon, rng);
    m.emit("forecast_states.csv", incdyn::io::forecast_states_csv(fc));
    const auto bands = incdyn::predictive_summaries(fc, grid, {}, z, level);
    for (const auto& b : bands) m.emit("forecast_" + b.label + ".csv", incdyn::io::bands_csv(b));
    m.emit("forecast_welfare.csv", incdyn::io::band_welfare_csv(bands));
    std::vector<std::vector<incdyn::ParameterVector>> pars(fc.horizon());
    for (std::size_t h = 0; h < fc.horizon(); ++h) {
      for (std::size_t d = 0; d < fc.num_draws(); ++d) pars[h].push_back(fc.params(d, h));
    }
    m.emit("forecast_welfare_draws.csv", incdyn::io::welfare_draws_csv(fc.labels, pars, z));
  };
}

Work cmd_cv(const Options& o, Manifest& m) {
  if (o.model.empty()) throw incdyn::UsageError("--model is required");
  const auto model = incdyn::parse_model(o.model);
  const auto kind = incdyn::parse_distribution(o.dist);
  const auto cfg = fit_config(o);
  if (o.folds < 2) throw incdyn::UsageError("--folds must be at least 2");
  incdyn::CvOptions cv;
  cv.folds = o.folds;
  cv.threads = o.threads;
  cv.oracle = o.oracle;
  m.config = {{"in", o.in},
              {"model", std::string(incdyn::to_string(model))},
              {"dist", std::string(incdyn::to_string(kind))},
              {"folds", cv.folds},
              {"oracle", cv.oracle},
              {"fit", incdyn::io::fit_config_json(cfg)}};
  return [o, model, kind, cfg, cv](Manifest& m) {
    const auto panel = incdyn::io::ingest(o.in);
    const auto r = incdyn::lps(panel, kind, model, cfg, cv);
    for (const auto& w : r.warnings) std::cerr << "warning: " << w << "\n";
    m.emit("cv.csv", incdyn::io::cv_csv(r, model, kind));
    m.emit("cv.json", incdyn::io::json_text(incdyn::io::cv_json(r, model, kind, cv.oracle)));
  };
}

Work cmd_curves(const Options& o, Manifest& m) {
  const auto z = poverty_line(o);
  const double level = credible_level(o, 0.99);
  const auto grid = u_grid(o);
  const auto years = o.years.empty() ? std::vector<std::string>{} : split_list(o.years);
  m.config = {{"in", o.in}, {"z", z.value()}, {"level", level}, {"grid", o.grid}, {"years", years}};
  return [o, z, level, grid, years](Manifest& m) {
    const auto draws = incdyn::io::read_drawset(o.in);
    std::vector<std::size_t> idx;
    if (years.empty()) {
      for (std::size_t t = 0; t < draws.num_years(); ++t) idx.push_back(t);
    } else {
      for (const auto& y : years) idx.push_back(incdyn::year_index(draws, y));
    }
    std::vector<std::vector<incdyn::ParameterVector>> pars;
    std::vector<incdyn::ParameterVector> pooled;
    std::vector<std::string> labels;
    for (auto t : idx) {
      pars.push_back(incdyn::year_params(draws, t));
      pooled.insert(pooled.end(), pars.back().begin(), pars.back().end());
      labels.push_back(draws.years[t]);
    }
    const auto ygrid = incdyn::default_y_grid(pooled);
    std::vector<incdyn::DistributionBands> all;
    for (std::size_t i = 0; i < idx.size(); ++i) {
      all.push_back(incdyn::distribution_bands(labels[i], pars[i], grid, ygrid, z, level));
      m.emit("curves_" + labels[i] + ".csv", incdyn::io::bands_csv(all.back()));
    }
    m.emit("curves_welfare.csv", incdyn::io::band_welfare_csv(all));
  };
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian time-varying parametric income distributions"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(INCDYN_VERSION));
  Options o;

  auto add_out = [&](CLI::App* c) { c->add_option("--out", o.out, "Output directory")->required(); };
  auto add_fit = [&](CLI::App* c) {
    c->add_option("--model", o.model, "Model: ind, rw or rw-hs")->required();
    c->add_option("--dist", o.dist, "Distribution: dagum, sm, beta2 or gb2")->capture_default_str();
    c->add_option("--iters", o.iters, "MCMC iterations")->capture_default_str();
    c->add_option("--burnin", o.burnin, "Burn-in iterations")->capture_default_str();
  };
  auto add_seed = [&](CLI::App* c) { c->add_option("--seed", o.seed, "Random seed")->capture_default_str(); };
  auto add_z = [&](CLI::App* c) { c->add_option("--z", o.z, "Poverty line (income units)")->required(); };
  auto add_level = [&](CLI::App* c) { c->add_option("--level", o.level, "Credible level"); };
  auto add_grid = [&](CLI::App* c) {
    c->add_option("--grid", o.grid, "Number of population shares u_i = i/(N+1)")->capture_default_str();
  };

  auto* sim = app.add_subcommand("simulate", "Simulate the random-walk Dagum panel");
  add_seed(sim);
  add_z(sim);
  add_out(sim);
  sim->add_option("--periods", o.periods, "Number of years")->capture_default_str();
  sim->add_option("--per-year", o.per_year, "Observations per year")->capture_default_str();

  auto* fitc = app.add_subcommand("fit", "Fit a model and store posterior draws");
  fitc->add_option("--in", o.in, "Input CSV with header year,income")->required();
  add_fit(fitc);
  add_seed(fitc);
  add_out(fitc);

  auto* wel = app.add_subcommand("welfare", "Posterior summaries of mean, Gini, FGT0 and FGT1");
  wel->add_option("--in", o.in, "Directory written by fit")->required();
  add_z(wel);
  add_level(wel);
  add_out(wel);

  auto* dom = app.add_subcommand("dominance", "Posterior dominance probabilities between two years");
  dom->add_option("--in", o.in, "Directory written by fit (year A)")->required();
  dom->add_option("--in-b", o.in_b, "Directory written by fit for year B (default: --in)");
  dom->add_option("--years", o.years, "Years A,B; reports P(A dominates B)")->required();
  dom->add_option("--relation", o.relation, "fsd, gld, ld or all")->capture_default_str();
  add_grid(dom);
  dom->add_option("--range", o.range, "Restrict the grid to lo:hi, e.g. 0.001:0.100");
  add_out(dom);

  auto* fc = app.add_subcommand("forecast", "Posterior-predictive projection beyond the last year");
  fc->add_option("--in", o.in, "Directory written by fit (rw or rw-hs)")->required();
  fc->add_option("--horizon", o.horizon, "Years ahead")->capture_default_str();
  add_seed(fc);
  add_z(fc);
  add_level(fc);
  add_grid(fc);
  add_out(fc);

  auto* cv = app.add_subcommand("cv", "K-fold cross-validated log predictive score");
  cv->add_option("--in", o.in, "Input CSV with header year,income")->required();
  add_fit(cv);
  add_seed(cv);
  cv->add_option("--folds", o.folds, "Number of folds")->capture_default_str();
  cv->add_option("--threads", o.threads, "Worker threads for folds (0 = all cores)")->capture_default_str();
  cv->add_flag("--oracle", o.oracle, "Score with the full-data fit (optimism check)");
  add_out(cv);

  auto* cur = app.add_subcommand("curves", "Per-year pdf, cdf, Lorenz and generalised Lorenz bands");
  cur->add_option("--in", o.in, "Directory written by fit")->required();
  add_z(cur);
  add_level(cur);
  add_grid(cur);
  cur->add_option("--years", o.years, "Comma-separated years (default: all)");
  add_out(cur);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    report_error("usage", e.what());
    return 2;
  }

  Manifest manifest;
  manifest.command = app.get_subcommands().front()->get_name();
  manifest.dir = o.out;
  Work work;
  try {
    const auto& name = manifest.command;
    if (name == "simulate") work = cmd_simulate(o, manifest);
    if (name == "fit") work = cmd_fit(o, manifest);
    if (name == "welfare") work = cmd_welfare(o, manifest);
    if (name == "dominance") work = cmd_dominance(o, manifest);
    if (name == "forecast") work = cmd_forecast(o, manifest);
    if (name == "cv") work = cmd_cv(o, manifest);
    if (name == "curves") work = cmd_curves(o, manifest);
  } catch (const incdyn::Error& e) {
    report_error(incdyn::to_string(e.category()), e.what());
    return exit_code(e.category());
  }

  try {
    work(manifest);
    manifest.write(std::nullopt);
    return 0;
  } catch (const incdyn::Error& e) {
    report_error(incdyn::to_string(e.category()), e.what());
    try {
      manifest.write(std::make_pair(std::string(incdyn::to_string(e.category())), std::string(e.what())));
    } catch (const std::exception&) {
    }
    return exit_code(e.category());
  } catch (const std::exception& e) {
    report_error("internal", e.what());
    try {
      manifest.write(std::make_pair(std::string("internal"), std::string(e.what())));
    } catch (const std::exception&) {
    }
    return 1;
  }
}
