#include <gtest/gtest.h>

#include <filesystem>
#include <string>

#include "incdyn/io.hpp"
#include "oracles.hpp"

using namespace incdyn;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("incdyn_io_test_" + std::to_string(::getpid())) / name;
  fs::remove_all(p);
  return p;
}

std::string message_of(const std::string& text) {
  try {
    io::parse_panel_csv(text, "f.csv");
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(Format, SeventeenDigits) {
  EXPECT_EQ(io::fmt(0.1), "0.10000000000000001");
  EXPECT_EQ(io::fmt(1.0), "1");
  EXPECT_EQ(io::fmt(NAN), "nan");
  EXPECT_EQ(io::fmt(-INFINITY), "-inf");
  for (double v : {329.58, 1.0 / 3.0, 6.02e23, 5e-324}) EXPECT_EQ(std::strtod(io::fmt(v).c_str(), nullptr), v);
}

TEST(Ingest, BasicParsing) {
  const auto p = io::parse_panel_csv("year,income\n2001,10.5\n2001,20\n");
  ASSERT_EQ(p.num_years(), 1u);
  EXPECT_EQ(p.incomes[0], (std::vector<double>{10.5, 20.0}));
  const auto q = io::parse_panel_csv("\xEF\xBB\xBFyear,income\r\n10,1\r\n9,2\r\n10,3\r\n\r\n");
  EXPECT_EQ(q.years, (std::vector<std::string>{"9", "10"}));
  EXPECT_EQ(q.incomes[1], (std::vector<double>{1.0, 3.0}));
  const auto lex = io::parse_panel_csv("year,income\nwave_b,1\nwave_a,2\n");
  EXPECT_EQ(lex.years, (std::vector<std::string>{"wave_a", "wave_b"}));
}

TEST(Ingest, RejectionsNameTheLine) {
  EXPECT_NE(message_of("year,income\n2001,5\n2001,0\n").find("f.csv:3"), std::string::npos);
  EXPECT_NE(message_of("year,income\n2001,5\n2001,\n").find("f.csv:3"), std::string::npos);
  EXPECT_NE(message_of("year,income\n2001,-4\n").find("f.csv:2"), std::string::npos);
  EXPECT_NE(message_of("year,income\n2001,abc\n").find("f.csv:2"), std::string::npos);
  EXPECT_NE(message_of("").find("empty"), std::string::npos);
  EXPECT_NE(message_of("year,income\n").find("no data"), std::string::npos);
  EXPECT_NE(message_of("yr,inc\n1,2\n").find("header"), std::string::npos);
  EXPECT_THROW(io::ingest(scratch("missing.csv")), IoError);
}

TEST(Ingest, SimulatedPanelRoundTrips) {
  const auto sim = simulate_dgp(DgpConfig{}, PovertyLine(160.0));
  const auto back = io::parse_panel_csv(io::panel_csv(sim.panel));
  EXPECT_EQ(back.years, sim.panel.years);
  EXPECT_EQ(back.incomes, sim.panel.incomes);
  EXPECT_EQ(back.num_observations(), 25u * 250u);
}

TEST(AtomicWrite, CreatesDirectoriesAndLeavesNoTemporaries) {
  const fs::path dir = scratch("nested");
  io::atomic_write(dir / "a" / "b.txt", "hello");
  EXPECT_EQ(io::read_file(dir / "a" / "b.txt"), "hello");
  io::atomic_write(dir / "a" / "b.txt", "again");
  EXPECT_EQ(io::read_file(dir / "a" / "b.txt"), "again");
  std::size_t files = 0;
  for (const auto& e : fs::directory_iterator(dir / "a")) files += e.is_regular_file();
  EXPECT_EQ(files, 1u);
}

TEST(DrawSetFiles, RoundTripExactly) {
  DgpConfig dgp;
  dgp.years = 4;
  dgp.per_year = 40;
  const Panel panel = simulate_dgp(dgp, PovertyLine(160.0)).panel;
  FitConfig cfg;
  cfg.iterations = 60;
  cfg.burn_in = 30;
  for (ModelTag m : {ModelTag::independent, ModelTag::rw, ModelTag::rw_hs}) {
    const auto ds = fit(panel, DistributionKind::Dagum, m, cfg);
    const fs::path dir = scratch(std::string("draws_") + std::string(to_string(m)));
    io::write_drawset(dir, ds);
    const auto back = io::read_drawset(dir);
    EXPECT_EQ(back.model, ds.model);
    EXPECT_EQ(back.years, ds.years);
    EXPECT_EQ(back.config.seed, ds.config.seed);
    EXPECT_EQ(back.acceptance, ds.acceptance);
    ASSERT_EQ(back.num_draws(), ds.num_draws());
    for (std::size_t i = 0; i < ds.num_draws(); ++i) {
      EXPECT_TRUE(back.paths[i] == ds.paths[i]);
      if (m == ModelTag::rw) { EXPECT_TRUE(back.sigma2[i].sigma2 == ds.sigma2[i].sigma2); }
      if (m == ModelTag::rw_hs) {
        EXPECT_EQ(back.horseshoe[i].tau2, ds.horseshoe[i].tau2);
        EXPECT_TRUE(back.horseshoe[i].nu == ds.horseshoe[i].nu);
      }
    }
    // Re-serialising gives the same bytes.
    EXPECT_EQ(io::drawset_csv(back), io::drawset_csv(ds));
  }
}

TEST(DrawSetFiles, HeaderLayout) {
  const auto ds = oracle::drawset_from_states(ModelTag::rw_hs, DistributionKind::Dagum, {"2001", "2002"},
                                              {{oracle::log_params({3, 300, 0.6}), oracle::log_params({3, 310, 0.6})}});
  const std::string csv = io::drawset_csv(ds);
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "iteration,theta_2001_a,theta_2001_b,theta_2001_p,theta_2002_a,theta_2002_b,theta_2002_p,"
            "tau2,xi,lambda2_a,lambda2_b,lambda2_p,nu_a,nu_b,nu_p");
}

TEST(DrawSetFiles, CorruptInputIsAnIoError) {
  const auto ds = oracle::drawset_from_states(ModelTag::rw, DistributionKind::Dagum, {"1", "2", "3"},
                                              {{oracle::log_params({3, 300, 0.6}), oracle::log_params({3, 310, 0.6}),
                                                oracle::log_params({3, 320, 0.6})}});
  const fs::path dir = scratch("corrupt");
  io::write_drawset(dir, ds);
  io::atomic_write(dir / "draws.csv", "iteration,x\n1,2\n");
  EXPECT_THROW(io::read_drawset(dir), IoError);
  io::atomic_write(dir / "draws.json", "{not json");
  EXPECT_THROW(io::read_drawset(dir), IoError);
}

TEST(Tables, WelfareAndCvHeaders) {
  const auto row = oracle::log_params({3.54, 329.58, 0.61});
  const auto ds = oracle::drawset_from_states(ModelTag::rw, DistributionKind::Dagum, {"2001"}, {{row}});
  const auto csv = io::welfare_csv(welfare_series(ds, PovertyLine(160.0), 0.95));
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "year,measure,posterior_mean,lower,upper,excluded_fraction");
  EXPECT_NE(csv.find("2001,gini,"), std::string::npos);
  LpsResult r;
  r.folds = 2;
  r.per_fold = {{1, 3, -10.5, {}}, {2, 3, -11.0, {}}};
  const auto cv = io::cv_csv(r, ModelTag::rw, DistributionKind::Dagum);
  EXPECT_EQ(cv, "model,distribution,fold,held_out,score\nrw,dagum,1,3,-10.5\nrw,dagum,2,3,-11\n");
}
