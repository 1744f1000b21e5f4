#pragma once

// K-fold cross-validated log predictive score. Folds are formed within each
// year; every held-out income is scored by its posterior predictive density
// (1/M) sum_m p(y | theta_t^(m)) from a fit that did not see it.

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "incdyn/dists.hpp"
#include "incdyn/error.hpp"
#include "incdyn/mcmc.hpp"
#include "incdyn/parallel.hpp"
#include "incdyn/random.hpp"

namespace incdyn {

struct FoldAssignment {
  std::size_t folds = 0;
  std::vector<std::vector<std::size_t>> fold_of;  // [year][observation] -> 1..K
  std::vector<std::string> warnings;

  /// Number of observations of year t in fold f.
  std::size_t count(std::size_t t, std::size_t f) const {
    std::size_t c = 0;
    for (auto v : fold_of.at(t)) c += v == f;
    return c;
  }
};

namespace detail {

// Unbiased index in [0, n) by rejection; independent of the standard
// library's distribution implementations.
inline std::size_t uniform_index(std::size_t n, Rng& rng) {
  const std::uint64_t bound = static_cast<std::uint64_t>(n);
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
  for (;;) {
    const std::uint64_t r = rng();
    if (r < limit) return static_cast<std::size_t>(r % bound);
  }
}

}  // namespace detail

/// Balanced random partition of every year into K folds: observation i gets
/// fold (i mod K) + 1 and the labels are then shuffled (Fisher-Yates).
inline FoldAssignment assign_folds(const Panel& panel, std::size_t K, Rng& rng) {
  if (K < 2) throw UsageError("cross-validation needs at least 2 folds");
  panel.validate();
  FoldAssignment out;
  out.folds = K;
  for (std::size_t t = 0; t < panel.num_years(); ++t) {
    const std::size_t n = panel.incomes[t].size();
    std::vector<std::size_t> labels(n);
    for (std::size_t i = 0; i < n; ++i) labels[i] = i % K + 1;
    for (std::size_t i = n; i > 1; --i) std::swap(labels[i - 1], labels[detail::uniform_index(i, rng)]);
    if (n < K) {
      std::ostringstream os;
      os << "year " << panel.years[t] << " has " << n << " observations, fewer than " << K
         << " folds; some of its held-out cells are empty";
      out.warnings.push_back(os.str());
    }
    out.fold_of.push_back(std::move(labels));
  }
  return out;
}

struct HeldOut {
  std::size_t year = 0;
  std::size_t index = 0;  // position within the year in the input panel
  double income = 0.0;
};

/// Training panel (fold f removed) and the held-out observations of fold f.
inline std::pair<Panel, std::vector<HeldOut>> split_fold(const Panel& panel, const FoldAssignment& folds,
                                                         std::size_t f) {
  Panel train;
  train.years = panel.years;
  train.incomes.resize(panel.num_years());
  std::vector<HeldOut> held;
  for (std::size_t t = 0; t < panel.num_years(); ++t) {
    for (std::size_t i = 0; i < panel.incomes[t].size(); ++i) {
      const double y = panel.incomes[t][i];
      if (folds.fold_of[t][i] == f) {
        held.push_back({t, i, y});
      } else {
        train.incomes[t].push_back(y);
      }
    }
  }
  return {std::move(train), std::move(held)};
}

/// log (1/M) sum_m p(y | theta_t^(m)) for each held-out observation.
inline std::vector<double> log_predictive_densities(const DrawSet& draws, const std::vector<HeldOut>& held) {
  const std::size_t M = draws.num_draws();
  if (M == 0) throw DomainError("log predictive density: empty draw set");
  std::vector<std::vector<ParameterVector>> pars(draws.num_years());
  std::vector<char> needed(draws.num_years(), 0);
  for (const auto& h : held) needed.at(h.year) = 1;
  for (std::size_t t = 0; t < draws.num_years(); ++t) {
    if (!needed[t]) continue;
    pars[t].reserve(M);
    for (std::size_t m = 0; m < M; ++m) pars[t].push_back(draws.params(m, t));
  }
  const double log_m = std::log(static_cast<double>(M));
  std::vector<double> out(held.size());
  std::vector<double> lp(M);
  for (std::size_t j = 0; j < held.size(); ++j) {
    const auto& p = pars[held[j].year];
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t m = 0; m < M; ++m) {
      lp[m] = log_pdf(p[m], held[j].income);
      mx = std::max(mx, lp[m]);
    }
    if (!std::isfinite(mx)) {
      out[j] = -std::numeric_limits<double>::infinity();
      continue;
    }
    double s = 0.0;
    for (std::size_t m = 0; m < M; ++m) s += std::exp(lp[m] - mx);
    out[j] = mx + std::log(s) - log_m;
  }
  return out;
}

struct FoldScore {
  std::size_t fold = 0;
  std::size_t held_out = 0;
  double score = 0.0;  // sum of held-out log predictive densities
  std::vector<std::string> warnings;
};

struct LpsResult {
  std::size_t folds = 0;
  std::size_t observations = 0;
  double score = 0.0;    // sum over all held-out observations
  double average = 0.0;  // score / observations
  std::vector<FoldScore> per_fold;
  std::vector<std::string> warnings;
  std::optional<std::string> non_finite;  // first observation with zero predictive density
};

struct CvOptions {
  std::size_t folds = 10;
  std::size_t threads = 0;  // 0 = hardware concurrency
  // Score with the full-data fit instead of refitting per fold (in-sample
  // optimism check; not a cross-validation score).
  bool oracle = false;
};

/// Fold seeds are derived from config.seed: fold assignment uses stream 0,
/// the fit of fold f uses stream f, the full-data oracle fit stream K + 1.
inline LpsResult lps(const Panel& panel, DistributionKind kind, ModelTag model, const FitConfig& config,
                     const CvOptions& options = {}) {
  config.validate();
  panel.validate();
  detail::check_model_horizon(model, panel.num_years());
  const std::size_t K = options.folds;
  Rng fold_rng(derive_seed(config.seed, 0));
  const auto folds = assign_folds(panel, K, fold_rng);

  LpsResult out;
  out.folds = K;
  out.warnings = folds.warnings;
  out.per_fold.resize(K);
  std::vector<std::vector<HeldOut>> held(K);
  std::vector<std::vector<double>> dens(K);

  std::optional<DrawSet> full;
  if (options.oracle) {
    FitConfig cfg = config;
    cfg.seed = derive_seed(config.seed, K + 1);
    full = fit(panel, kind, model, cfg);
  }

  parallel_for(
      K,
      [&](std::size_t i) {
        const std::size_t f = i + 1;
        auto [train, h] = split_fold(panel, folds, f);
        FoldScore& fs = out.per_fold[i];
        fs.fold = f;
        for (std::size_t t = 0; t < train.num_years(); ++t) {
          if (train.incomes[t].empty()) {
            fs.warnings.push_back("fold " + std::to_string(f) + " leaves year " + train.years[t] +
                                  " without training data");
          }
        }
        if (options.oracle) {
          dens[i] = log_predictive_densities(*full, h);
        } else {
          FitConfig cfg = config;
          cfg.seed = derive_seed(config.seed, f);
          const DrawSet draws = fit(train, kind, model, cfg, true);
          dens[i] = log_predictive_densities(draws, h);
        }
        held[i] = std::move(h);
      },
      options.threads);

  for (std::size_t i = 0; i < K; ++i) {
    FoldScore& fs = out.per_fold[i];
    fs.held_out = held[i].size();
    for (std::size_t j = 0; j < held[i].size(); ++j) {
      fs.score += dens[i][j];
      if (!std::isfinite(dens[i][j]) && !out.non_finite) {
        std::ostringstream os;
        os << "year " << panel.years[held[i][j].year] << ", observation " << held[i][j].index + 1 << " (income "
           << held[i][j].income << ") has zero predictive density";
        out.non_finite = os.str();
      }
    }
    out.score += fs.score;
    out.observations += fs.held_out;
    out.warnings.insert(out.warnings.end(), fs.warnings.begin(), fs.warnings.end());
  }
  out.average = out.score / static_cast<double>(out.observations);
  return out;
}

}  // namespace incdyn
