#include <gtest/gtest.h>

#include <unistd.h>

#include "cli_support.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

fs::path workdir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("incdyn_cli_test_" + std::to_string(::getpid())) / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

void write(const fs::path& p, const std::string& s) {
  std::ofstream out(p, std::ios::binary);
  out << s;
}

json error_line(const std::string& err) {
  const auto nl = err.find('\n');
  return json::parse(err.substr(0, nl));
}

}  // namespace

TEST(Cli, UnknownFlagIsUsageError) {
  const auto dir = workdir("usage");
  const auto r = cli::run(dir, "fit --in x.csv --model rw --out o --bogus 1");
  EXPECT_EQ(r.code, 2);
  EXPECT_EQ(error_line(r.err)["error"]["category"], "usage");
  EXPECT_EQ(cli::run(dir, "").code, 2);
  EXPECT_EQ(cli::run(dir, "fit --in x.csv --out o").code, 2);  // --model missing
  EXPECT_EQ(cli::run(dir, "fit --in x.csv --model ar1 --out o").code, 2);
  EXPECT_EQ(cli::run(dir, "fit --in x.csv --model rw --iters 10 --burnin 10 --out o").code, 2);
  EXPECT_EQ(cli::run(dir, "dominance --in d --years 1,2 --range 0.5:0.1 --out o").code, 2);
  EXPECT_EQ(cli::run(dir, "--version").code, 0);
}

TEST(Cli, IoAndDomainErrorsWriteManifest) {
  const auto dir = workdir("errors");
  auto r = cli::run(dir, "fit --in missing.csv --model rw --out out_io");
  EXPECT_EQ(r.code, 5);
  EXPECT_EQ(error_line(r.err)["error"]["category"], "io");
  const auto manifest = json::parse(cli::slurp(dir / "out_io" / "manifest.json"));
  EXPECT_EQ(manifest["status"], "error");
  EXPECT_EQ(manifest["error"]["category"], "io");
  EXPECT_EQ(manifest["command"], "fit");

  write(dir / "bad.csv", "year,income\n2001,12\n2001,0\n");
  r = cli::run(dir, "fit --in bad.csv --model ind --out out_domain");
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(error_line(r.err)["error"]["message"].get<std::string>().find("bad.csv:3"), std::string::npos);

  write(dir / "short.csv", "year,income\n2001,12\n2001,30\n2002,14\n2002,18\n");
  r = cli::run(dir, "fit --in short.csv --model rw --iters 20 --burnin 10 --out out_short");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("rw-hs"), std::string::npos);
}

TEST(Cli, PipelineProducesExpectedFiles) {
  const auto dir = workdir("pipeline");
  ASSERT_EQ(cli::pipeline(dir), "");
  for (const char* f : {"sim/panel.csv", "sim/truth.csv", "sim/manifest.json", "fit_rw/draws.csv", "fit_rw/draws.json",
                        "welfare/welfare.csv", "dom/dominance.json", "dom/dominance_curve.csv",
                        "forecast/forecast_states.csv", "forecast/forecast_2007.csv", "forecast/forecast_2009.csv",
                        "forecast/forecast_welfare.csv", "forecast/forecast_welfare_draws.csv",
                        "curves/curves_2001.csv", "curves/curves_2006.csv", "curves/curves_welfare.csv", "cv/cv.csv",
                        "cv/cv.json"}) {
    EXPECT_TRUE(fs::exists(dir / f)) << f;
  }
  const auto welfare = cli::slurp(dir / "welfare" / "welfare.csv");
  EXPECT_EQ(welfare.substr(0, welfare.find('\n')), "year,measure,posterior_mean,lower,upper,excluded_fraction");
  EXPECT_EQ(std::count(welfare.begin(), welfare.end(), '\n'), 1 + 6 * 4);

  const auto dom = json::parse(cli::slurp(dir / "dom" / "dominance.json"));
  ASSERT_EQ(dom["reports"].size(), 3u);
  for (const auto& r : dom["reports"]) {
    EXPECT_NEAR(r["p_a_dominates_b"].get<double>() + r["p_b_dominates_a"].get<double>() + r["p_neither"].get<double>(),
                1.0, 1e-12);
    EXPECT_EQ(r["grid_points"], 999);
  }
  const auto poor = json::parse(cli::slurp(dir / "dom_poor" / "dominance.json"));
  EXPECT_EQ(poor["reports"][0]["grid_points"], 100);
  EXPECT_DOUBLE_EQ(poor["reports"][0]["grid_hi"].get<double>(), 0.1);

  const auto cv = json::parse(cli::slurp(dir / "cv" / "cv.json"));
  EXPECT_EQ(cv["observations"], 360);
  EXPECT_LT(cv["log_predictive_score"].get<double>(), 0.0);

  const auto manifest = json::parse(cli::slurp(dir / "fit_rw" / "manifest.json"));
  EXPECT_EQ(manifest["status"], "ok");
  EXPECT_EQ(manifest["config"]["fit"]["seed"], 3);
  EXPECT_TRUE(manifest["versions"].contains("incdyn"));

  // Forecast needs a transition law.
  const auto r = cli::run(dir, "forecast --in fit_ind --z 160 --out fc_ind");
  EXPECT_EQ(r.code, 2);
}

TEST(Cli, SimulatedPanelIngestsLosslessly) {
  const auto dir = workdir("roundtrip");
  ASSERT_EQ(cli::run(dir, "simulate --z 160 --out sim").code, 0);
  const auto text = cli::slurp(dir / "sim" / "panel.csv");
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 1 + 25 * 250);
  const auto again = cli::run(dir, "simulate --z 160 --out sim2");
  ASSERT_EQ(again.code, 0);
  EXPECT_EQ(cli::slurp(dir / "sim2" / "panel.csv"), text);
}
