#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

#include "oracles.hpp"

using namespace incdyn;
using K = DistributionKind;

namespace {

Panel panel_with_sizes(const std::vector<std::size_t>& sizes) {
  Panel p;
  for (std::size_t t = 0; t < sizes.size(); ++t) {
    p.years.push_back(std::to_string(2000 + t));
    std::vector<double> y(sizes[t]);
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = 100.0 + static_cast<double>(i);
    p.incomes.push_back(y);
  }
  return p;
}

}  // namespace

TEST(Folds, BalancedAndComplete) {
  const Panel p = panel_with_sizes({10, 25, 7});
  Rng rng(3);
  const auto f = assign_folds(p, 10, rng);
  for (std::size_t k = 1; k <= 10; ++k) EXPECT_EQ(f.count(0, k), 1u);
  std::vector<std::size_t> sizes;
  for (std::size_t k = 1; k <= 10; ++k) sizes.push_back(f.count(1, k));
  std::sort(sizes.rbegin(), sizes.rend());
  EXPECT_EQ(sizes, (std::vector<std::size_t>{3, 3, 3, 3, 3, 2, 2, 2, 2, 2}));
  for (const auto& year : f.fold_of) {
    for (auto v : year) {
      EXPECT_GE(v, 1u);
      EXPECT_LE(v, 10u);
    }
  }
  ASSERT_EQ(f.warnings.size(), 1u);
  EXPECT_NE(f.warnings[0].find("2002"), std::string::npos);

  // Every observation is held out exactly once.
  std::map<std::pair<std::size_t, std::size_t>, int> seen;
  for (std::size_t k = 1; k <= 10; ++k) {
    for (const auto& h : split_fold(p, f, k).second) ++seen[{h.year, h.index}];
  }
  EXPECT_EQ(seen.size(), 42u);
  for (const auto& [key, n] : seen) EXPECT_EQ(n, 1);
}

TEST(Folds, DeterministicAndValidated) {
  const Panel p = panel_with_sizes({30, 31});
  Rng a(5), b(5), c(6);
  EXPECT_EQ(assign_folds(p, 4, a).fold_of, assign_folds(p, 4, b).fold_of);
  EXPECT_NE(assign_folds(p, 4, c).fold_of, assign_folds(p, 4, a).fold_of);
  EXPECT_THROW(assign_folds(p, 1, a), UsageError);
}

TEST(PredictiveDensity, SingleDrawIsPdf) {
  const auto ds = oracle::drawset_from_states(ModelTag::independent, K::Dagum, {"y"}, {{oracle::log_params({3, 200, 0.8})}});
  const std::vector<HeldOut> held = {{0, 0, 150.0}, {0, 1, 900.0}};
  const auto lp = log_predictive_densities(ds, held);
  const ParameterVector par(K::Dagum, {3, 200, 0.8});
  EXPECT_NEAR(lp[0], log_pdf(par, 150.0), 1e-12);
  EXPECT_NEAR(lp[1], log_pdf(par, 900.0), 1e-12);
}

TEST(PredictiveDensity, MixtureAverageInLogSpace) {
  const auto ds = oracle::drawset_from_states(ModelTag::independent, K::Dagum, {"y"},
                                              {{oracle::log_params({3, 200, 0.8})}, {oracle::log_params({2, 500, 1.5})}});
  const auto lp = log_predictive_densities(ds, {{0, 0, 300.0}});
  const double ref = std::log(0.5 * (pdf(ParameterVector(K::Dagum, {3, 200, 0.8}), 300.0) +
                                     pdf(ParameterVector(K::Dagum, {2, 500, 1.5}), 300.0)));
  EXPECT_NEAR(lp[0], ref, 1e-12);
  // Far in the tail the direct average underflows; log-sum-exp does not.
  const auto tail = log_predictive_densities(ds, {{0, 0, 1e200}});
  EXPECT_TRUE(std::isfinite(tail[0]));
}

TEST(PredictiveDensity, OrderOfHeldOutDoesNotMatter) {
  const auto ds = oracle::drawset_from_states(ModelTag::independent, K::Dagum, {"y"},
                                              {{oracle::log_params({3, 200, 0.8})}, {oracle::log_params({2.5, 260, 1.1})}});
  std::vector<HeldOut> held;
  for (int i = 0; i < 20; ++i) held.push_back({0, static_cast<std::size_t>(i), 50.0 + 37.0 * i});
  auto sum = [&](const std::vector<HeldOut>& h) {
    double s = 0;
    for (double v : log_predictive_densities(ds, h)) s += v;
    return s;
  };
  const double base = sum(held);
  std::reverse(held.begin(), held.end());
  EXPECT_NEAR(sum(held), base, 1e-10 * std::fabs(base));
}

TEST(Lps, OracleModeIsOptimistic) {
  DgpConfig dgp;
  dgp.years = 5;
  dgp.per_year = 80;
  dgp.seed = 4;
  const Panel panel = simulate_dgp(dgp, PovertyLine(160.0)).panel;
  FitConfig cfg;
  cfg.iterations = 1200;
  cfg.burn_in = 600;
  cfg.seed = 11;
  CvOptions opt;
  opt.folds = 5;
  const auto cv = lps(panel, K::Dagum, ModelTag::rw, cfg, opt);
  EXPECT_EQ(cv.observations, 400u);
  EXPECT_EQ(cv.per_fold.size(), 5u);
  EXPECT_NEAR(cv.average, cv.score / 400.0, 1e-12);
  double s = 0;
  for (const auto& f : cv.per_fold) s += f.score;
  EXPECT_NEAR(s, cv.score, 1e-9 * std::fabs(s));
  EXPECT_FALSE(cv.non_finite.has_value());
  opt.oracle = true;
  const auto in_sample = lps(panel, K::Dagum, ModelTag::rw, cfg, opt);
  EXPECT_GE(in_sample.score, cv.score);

  opt.oracle = false;
  opt.threads = 2;
  const auto threaded = lps(panel, K::Dagum, ModelTag::rw, cfg, opt);
  EXPECT_EQ(threaded.score, cv.score);
}

TEST(Lps, ReportsModelHorizonErrors) {
  const Panel two = panel_with_sizes({20, 20});
  FitConfig cfg;
  cfg.iterations = 20;
  cfg.burn_in = 10;
  EXPECT_THROW(lps(two, K::Dagum, ModelTag::rw, cfg, {}), UsageError);
}
