#pragma once

// File formats: the `year,income` input CSV, simulated truth, draw sets,
// welfare/dominance/forecast/cross-validation tables. Numbers are written
// with 17 significant digits so that every value round-trips exactly, and
// every file is written to a temporary name and renamed into place.

#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "incdyn/crossval.hpp"
#include "incdyn/dists.hpp"
#include "incdyn/dominance.hpp"
#include "incdyn/error.hpp"
#include "incdyn/forecast.hpp"
#include "incdyn/mcmc.hpp"
#include "incdyn/model.hpp"
#include "incdyn/simulate.hpp"
#include "incdyn/welfare.hpp"
#include "json.hpp"

namespace incdyn::io {

using json = nlohmann::ordered_json;

inline std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Writes `content` to `path` through a temporary file in the same
/// directory followed by a rename, creating parent directories.
inline void atomic_write(const std::filesystem::path& path, const std::string& content) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (path.has_parent_path()) {
    fs::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
  }
  fs::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw IoError("write failed for " + tmp.string());
  }
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("cannot move output into place at " + path.string());
  }
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  if (in.bad()) throw IoError("read failed for " + path.string());
  return os.str();
}

inline std::string json_text(const json& j) { return j.dump(2) + "\n"; }

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find(',', start);
    out.push_back(trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline std::vector<std::string_view> lines_of(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (start < text.size()) {
    auto pos = text.find('\n', start);
    if (pos == std::string_view::npos) pos = text.size();
    out.push_back(text.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

/// Strict decimal parse of the whole field.
inline std::optional<double> parse_double(std::string_view s) {
  if (s.empty()) return std::nullopt;
  std::string buf(s);
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(buf.c_str(), &end);
  if (end != buf.c_str() + buf.size()) return std::nullopt;
  if (errno == ERANGE && std::isinf(v)) return std::nullopt;
  return v;
}

inline bool is_integer_label(const std::string& s) {
  if (s.empty()) return false;
  std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
  if (i == s.size()) return false;
  for (; i < s.size(); ++i) {
    if (s[i] < '0' || s[i] > '9') return false;
  }
  return true;
}

inline double field(const std::vector<std::string_view>& row, std::size_t i, const std::string& where) {
  if (i >= row.size()) throw IoError(where + ": missing column " + std::to_string(i + 1));
  const auto v = parse_double(row[i]);
  if (!v) throw IoError(where + ": cannot parse '" + std::string(row[i]) + "' as a number");
  return *v;
}

}  // namespace detail

/// Parses `year,income` CSV text. Years are sorted numerically when every
/// label is an integer and lexicographically otherwise; the order of
/// incomes within a year follows the file.
inline Panel parse_panel_csv(std::string_view text, const std::string& source = "input") {
  const auto lines = detail::lines_of(text);
  std::size_t i = 0;
  while (i < lines.size() && detail::trim(lines[i]).empty()) ++i;
  if (i == lines.size()) throw DomainError(source + ": file is empty");
  {
    const auto header = detail::split_commas(lines[i]);
    std::string h0(header[0]);
    if (h0.size() >= 3 && static_cast<unsigned char>(h0[0]) == 0xEF) h0 = h0.substr(3);  // UTF-8 BOM
    if (header.size() != 2 || h0 != "year" || header[1] != "income") {
      throw DomainError(source + ":" + std::to_string(i + 1) + ": expected header 'year,income'");
    }
  }
  std::map<std::string, std::vector<double>> by_year;
  std::vector<std::string> order;
  std::size_t rows = 0;
  for (++i; i < lines.size(); ++i) {
    const auto line = detail::trim(lines[i]);
    if (line.empty()) continue;
    const std::string where = source + ":" + std::to_string(i + 1);
    const auto cols = detail::split_commas(line);
    if (cols.size() != 2) throw DomainError(where + ": expected 2 fields, found " + std::to_string(cols.size()));
    if (cols[0].empty()) throw DomainError(where + ": missing year");
    if (cols[1].empty()) throw DomainError(where + ": missing income");
    const auto y = detail::parse_double(cols[1]);
    if (!y) throw DomainError(where + ": income '" + std::string(cols[1]) + "' is not a number");
    if (!(*y > 0.0) || !std::isfinite(*y)) {
      throw DomainError(where + ": income must be positive and finite, got '" + std::string(cols[1]) + "'");
    }
    std::string year(cols[0]);
    auto [it, inserted] = by_year.try_emplace(year);
    if (inserted) order.push_back(year);
    it->second.push_back(*y);
    ++rows;
  }
  if (rows == 0) throw DomainError(source + ": no data rows");
  const bool numeric = std::all_of(order.begin(), order.end(), detail::is_integer_label);
  std::sort(order.begin(), order.end(), [numeric](const std::string& a, const std::string& b) {
    if (numeric) return std::stoll(a) < std::stoll(b);
    return a < b;
  });
  Panel p;
  for (const auto& y : order) {
    p.years.push_back(y);
    p.incomes.push_back(std::move(by_year[y]));
  }
  return p;
}

inline Panel ingest(const std::filesystem::path& path) { return parse_panel_csv(read_file(path), path.string()); }

inline std::string panel_csv(const Panel& panel) {
  std::string out = "year,income\n";
  for (std::size_t t = 0; t < panel.num_years(); ++t) {
    for (double y : panel.incomes[t]) out += panel.years[t] + "," + fmt(y) + "\n";
  }
  return out;
}

inline std::string truth_csv(const SimulatedPanel& sim) {
  std::string out = "t,year,a,b,p,mean,gini,fgt0,fgt1\n";
  for (std::size_t t = 0; t < sim.truth.size(); ++t) {
    const auto& r = sim.truth[t];
    out += std::to_string(t + 1) + "," + r.year + "," + fmt(r.a) + "," + fmt(r.b) + "," + fmt(r.p) + "," +
           fmt(r.mean) + "," + fmt(r.gini) + "," + fmt(r.fgt0) + "," + fmt(r.fgt1) + "\n";
  }
  return out;
}

// ---- draw sets ----

inline std::vector<std::string> variance_columns(ModelTag model, DistributionKind kind) {
  std::vector<std::string> out;
  const auto names = parameter_names(kind);
  if (model == ModelTag::rw) {
    for (const auto& n : names) out.push_back("sigma2_" + n);
  } else if (model == ModelTag::rw_hs) {
    out.push_back("tau2");
    out.push_back("xi");
    for (const auto& n : names) out.push_back("lambda2_" + n);
    for (const auto& n : names) out.push_back("nu_" + n);
  }
  return out;
}

/// One row per kept draw: iteration, theta columns in (year, parameter)
/// order, then the variance or shrinkage columns.
inline std::string drawset_csv(const DrawSet& d) {
  const auto names = parameter_names(d.kind);
  std::string out = "iteration";
  for (const auto& y : d.years) {
    for (const auto& n : names) out += ",theta_" + y + "_" + n;
  }
  for (const auto& c : variance_columns(d.model, d.kind)) out += "," + c;
  out += "\n";
  const auto T = static_cast<Eigen::Index>(d.num_years());
  const auto K = static_cast<Eigen::Index>(d.dim());
  for (std::size_t m = 0; m < d.num_draws(); ++m) {
    out += std::to_string(d.config.burn_in + m + 1);
    for (Eigen::Index t = 0; t < T; ++t) {
      for (Eigen::Index k = 0; k < K; ++k) out += "," + fmt(d.paths[m](t, k));
    }
    if (d.model == ModelTag::rw) {
      for (Eigen::Index k = 0; k < K; ++k) out += "," + fmt(d.sigma2[m].sigma2[k]);
    } else if (d.model == ModelTag::rw_hs) {
      const auto& h = d.horseshoe[m];
      out += "," + fmt(h.tau2) + "," + fmt(h.xi);
      for (Eigen::Index k = 0; k < K; ++k) out += "," + fmt(h.lambda2[k]);
      for (Eigen::Index k = 0; k < K; ++k) out += "," + fmt(h.nu[k]);
    }
    out += "\n";
  }
  return out;
}

inline json fit_config_json(const FitConfig& c) {
  return json{{"iterations", c.iterations},
              {"burn_in", c.burn_in},
              {"target_acceptance", c.target_acceptance},
              {"seed", c.seed},
              {"initial_step", c.initial_step},
              {"adapt_window", c.adapt_window},
              {"warmup_fraction", c.warmup_fraction},
              {"path_shift_moves", c.path_shift_moves},
              {"block_moves", c.block_moves},
              {"conditional_proposals", c.conditional_proposals}};
}

inline FitConfig fit_config_from_json(const json& j) {
  FitConfig c;
  c.iterations = j.at("iterations").get<std::size_t>();
  c.burn_in = j.at("burn_in").get<std::size_t>();
  c.target_acceptance = j.at("target_acceptance").get<double>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.initial_step = j.at("initial_step").get<double>();
  c.adapt_window = j.at("adapt_window").get<std::size_t>();
  c.warmup_fraction = j.value("warmup_fraction", c.warmup_fraction);
  c.path_shift_moves = j.value("path_shift_moves", c.path_shift_moves);
  c.block_moves = j.value("block_moves", c.block_moves);
  c.conditional_proposals = j.value("conditional_proposals", c.conditional_proposals);
  return c;
}

/// Sidecar with configuration, provenance and acceptance statistics.
inline json drawset_json(const DrawSet& d) {
  json j;
  j["model"] = std::string(to_string(d.model));
  j["distribution"] = std::string(to_string(d.kind));
  j["parameters"] = parameter_names(d.kind);
  j["years"] = d.years;
  j["config"] = fit_config_json(d.config);
  j["kept_draws"] = d.num_draws();
  j["acceptance"] = d.acceptance;
  j["burn_in_acceptance"] = d.burn_in_acceptance;
  j["final_kappa"] = d.final_kappa;
  j["shift_acceptance"] = d.shift_acceptance ? json(*d.shift_acceptance) : json(nullptr);
  j["block_acceptance"] = d.block_acceptance ? json(*d.block_acceptance) : json(nullptr);
  j["numeric_failures"] = d.numeric_failures;
  if (d.num_draws() > 0) {
    const Eigen::MatrixXd ess = state_ess(d);
    json rows = json::array();
    for (Eigen::Index t = 0; t < ess.rows(); ++t) {
      json row = json::array();
      for (Eigen::Index k = 0; k < ess.cols(); ++k) row.push_back(ess(t, k));
      rows.push_back(row);
    }
    j["effective_sample_size"] = rows;
  }
  return j;
}

inline void write_drawset(const std::filesystem::path& dir, const DrawSet& d) {
  atomic_write(dir / "draws.csv", drawset_csv(d));
  atomic_write(dir / "draws.json", json_text(drawset_json(d)));
}

/// Reads a draw set written by write_drawset from `dir`.
inline DrawSet read_drawset(const std::filesystem::path& dir) {
  const auto meta_path = dir / "draws.json";
  const auto csv_path = dir / "draws.csv";
  json j;
  try {
    j = json::parse(read_file(meta_path));
  } catch (const json::exception& e) {
    throw IoError(meta_path.string() + ": " + e.what());
  }
  DrawSet d;
  try {
    d.model = parse_model(j.at("model").get<std::string>());
    d.kind = parse_distribution(j.at("distribution").get<std::string>());
    d.years = j.at("years").get<std::vector<std::string>>();
    d.config = fit_config_from_json(j.at("config"));
    d.acceptance = j.at("acceptance").get<std::vector<double>>();
    d.burn_in_acceptance = j.value("burn_in_acceptance", std::vector<double>{});
    d.final_kappa = j.value("final_kappa", std::vector<double>{});
    if (j.contains("shift_acceptance") && !j["shift_acceptance"].is_null()) {
      d.shift_acceptance = j["shift_acceptance"].get<double>();
    }
    if (j.contains("block_acceptance") && !j["block_acceptance"].is_null()) {
      d.block_acceptance = j["block_acceptance"].get<double>();
    }
    d.numeric_failures = j.value("numeric_failures", std::size_t{0});
  } catch (const json::exception& e) {
    throw IoError(meta_path.string() + ": " + e.what());
  }
  const std::string text = read_file(csv_path);
  const auto lines = detail::lines_of(text);
  if (lines.empty()) throw IoError(csv_path.string() + ": empty file");
  const auto T = static_cast<Eigen::Index>(d.years.size());
  const auto K = static_cast<Eigen::Index>(parameter_count(d.kind));
  const auto vcols = variance_columns(d.model, d.kind);
  const std::size_t expected = 1 + static_cast<std::size_t>(T * K) + vcols.size();
  if (detail::split_commas(lines[0]).size() != expected) {
    throw IoError(csv_path.string() + ": header does not match the sidecar (expected " + std::to_string(expected) +
                  " columns)");
  }
  for (std::size_t li = 1; li < lines.size(); ++li) {
    if (detail::trim(lines[li]).empty()) continue;
    const std::string where = csv_path.string() + ":" + std::to_string(li + 1);
    const auto row = detail::split_commas(lines[li]);
    if (row.size() != expected) throw IoError(where + ": expected " + std::to_string(expected) + " fields");
    LatentPath path(T, K);
    std::size_t c = 1;
    for (Eigen::Index t = 0; t < T; ++t) {
      for (Eigen::Index k = 0; k < K; ++k) {
        path(t, k) = detail::field(row, c++, where);
        if (!std::isfinite(path(t, k))) throw IoError(where + ": non-finite latent state");
      }
    }
    d.paths.push_back(std::move(path));
    if (d.model == ModelTag::rw) {
      InnovationScales s{Eigen::VectorXd(K)};
      for (Eigen::Index k = 0; k < K; ++k) s.sigma2[k] = detail::field(row, c++, where);
      d.sigma2.push_back(std::move(s));
    } else if (d.model == ModelTag::rw_hs) {
      HorseshoeState h;
      h.tau2 = detail::field(row, c++, where);
      h.xi = detail::field(row, c++, where);
      h.lambda2.resize(K);
      h.nu.resize(K);
      for (Eigen::Index k = 0; k < K; ++k) h.lambda2[k] = detail::field(row, c++, where);
      for (Eigen::Index k = 0; k < K; ++k) h.nu[k] = detail::field(row, c++, where);
      d.horseshoe.push_back(std::move(h));
    }
  }
  if (d.paths.empty()) throw IoError(csv_path.string() + ": no draws");
  return d;
}

// ---- welfare ----

inline std::string welfare_csv(const WelfareSeries& w) {
  std::string out = "year,measure,posterior_mean,lower,upper,excluded_fraction\n";
  for (const auto& r : w.records) {
    const std::pair<const char*, const Summary*> rows[] = {
        {"mean", &r.mean}, {"gini", &r.gini}, {"fgt0", &r.fgt0}, {"fgt1", &r.fgt1}};
    for (const auto& [name, s] : rows) {
      out += r.year + "," + name + "," + fmt(s->posterior_mean) + "," + fmt(s->lower) + "," + fmt(s->upper) + "," +
             fmt(r.excluded_draw_fraction) + "\n";
    }
  }
  return out;
}

// ---- dominance ----

inline json dominance_json(const DominanceReport& r, const std::string& year_a, const std::string& year_b) {
  return json{{"relation", std::string(to_string(r.relation))},
              {"year_a", year_a},
              {"year_b", year_b},
              {"p_a_dominates_b", r.p_a_dominates_b},
              {"p_b_dominates_a", r.p_b_dominates_a},
              {"p_neither", r.p_neither},
              {"min_curve_ab", r.curve_ab.empty() ? 0.0 : *std::min_element(r.curve_ab.begin(), r.curve_ab.end())},
              {"grid_points", r.grid.size()},
              {"grid_lo", r.grid.empty() ? 0.0 : r.grid.front()},
              {"grid_hi", r.grid.empty() ? 0.0 : r.grid.back()},
              {"draw_count", r.draw_count},
              {"excluded_draws", r.excluded_draws}};
}

inline std::string dominance_curve_csv(const std::vector<DominanceReport>& reports) {
  std::string out = "relation,u,p_ab,p_ba\n";
  for (const auto& r : reports) {
    for (std::size_t i = 0; i < r.grid.size(); ++i) {
      out += std::string(to_string(r.relation)) + "," + fmt(r.grid[i]) + "," + fmt(r.curve_ab[i]) + "," +
             fmt(r.curve_ba[i]) + "\n";
    }
  }
  return out;
}

// ---- bands (forecast and in-sample curves) ----

inline std::string bands_csv(const DistributionBands& b) {
  std::string out = "curve,x,mean,lower,upper\n";
  for (const auto& p : b.points) {
    out += std::string(to_string(p.curve)) + "," + fmt(p.x) + "," + fmt(p.summary.posterior_mean) + "," +
           fmt(p.summary.lower) + "," + fmt(p.summary.upper) + "\n";
  }
  return out;
}

/// Summaries of the welfare functionals of several band sets (one row per
/// label and measure).
inline std::string band_welfare_csv(const std::vector<DistributionBands>& all) {
  std::string out = "year,measure,posterior_mean,lower,upper,excluded_fraction\n";
  for (const auto& b : all) {
    auto row = [&](const char* name, const std::optional<Summary>& s) {
      if (!s) {
        out += b.label + "," + name + ",nan,nan,nan," + fmt(b.excluded_draw_fraction) + "\n";
        return;
      }
      out += b.label + "," + name + "," + fmt(s->posterior_mean) + "," + fmt(s->lower) + "," + fmt(s->upper) + "," +
             fmt(b.excluded_draw_fraction) + "\n";
    };
    row("mean", b.mean);
    row("gini", b.gini);
    row("fgt0", b.fgt0);
    row("fgt1", b.fgt1);
  }
  return out;
}

/// Per-draw welfare samples; mean and gini are empty for draws without a
/// finite mean. `pars` must be the parameter draws the bands were built from.
inline std::string welfare_draws_csv(const std::vector<std::string>& labels,
                                     const std::vector<std::vector<ParameterVector>>& pars, PovertyLine line) {
  std::string out = "year,draw,mean,gini,fgt0,fgt1\n";
  for (std::size_t h = 0; h < labels.size(); ++h) {
    for (std::size_t m = 0; m < pars[h].size(); ++m) {
      const auto f = draw_functionals(pars[h][m], line);
      out += labels[h] + "," + std::to_string(m + 1) + "," + (f.mean ? fmt(*f.mean) : "") + "," +
             (f.gini ? fmt(*f.gini) : "") + "," + fmt(f.fgt0) + "," + fmt(f.fgt1) + "\n";
    }
  }
  return out;
}

inline std::string forecast_states_csv(const ForecastDraws& fc) {
  const auto names = parameter_names(fc.kind);
  std::string out = "year,draw";
  for (const auto& n : names) out += ",theta_" + n;
  out += "\n";
  for (std::size_t h = 0; h < fc.horizon(); ++h) {
    for (std::size_t m = 0; m < fc.num_draws(); ++m) {
      out += fc.labels[h] + "," + std::to_string(m + 1);
      for (Eigen::Index k = 0; k < fc.states[m].cols(); ++k) {
        out += "," + fmt(fc.states[m](static_cast<Eigen::Index>(h), k));
      }
      out += "\n";
    }
  }
  return out;
}

// ---- cross-validation ----

inline std::string cv_csv(const LpsResult& r, ModelTag model, DistributionKind kind) {
  std::string out = "model,distribution,fold,held_out,score\n";
  for (const auto& f : r.per_fold) {
    out += std::string(to_string(model)) + "," + std::string(to_string(kind)) + "," + std::to_string(f.fold) + "," +
           std::to_string(f.held_out) + "," + fmt(f.score) + "\n";
  }
  return out;
}

inline json cv_json(const LpsResult& r, ModelTag model, DistributionKind kind, bool oracle) {
  json j;
  j["model"] = std::string(to_string(model));
  j["distribution"] = std::string(to_string(kind));
  j["folds"] = r.folds;
  j["oracle_mode"] = oracle;
  j["observations"] = r.observations;
  j["log_predictive_score"] = std::isfinite(r.score) ? json(r.score) : json(fmt(r.score));
  j["average_log_predictive_density"] = std::isfinite(r.average) ? json(r.average) : json(fmt(r.average));
  j["warnings"] = r.warnings;
  j["non_finite"] = r.non_finite ? json(*r.non_finite) : json(nullptr);
  return j;
}

}  // namespace incdyn::io
