#pragma once

// Simulated panels with Dagum parameters following a Gaussian random walk
// on the log scale.

#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "incdyn/dists.hpp"
#include "incdyn/error.hpp"
#include "incdyn/model.hpp"
#include "incdyn/random.hpp"
#include "incdyn/welfare.hpp"

namespace incdyn {

struct DgpConfig {
  std::size_t years = 25;
  std::size_t per_year = 250;
  std::array<double, 3> initial{3.54, 329.58, 0.61};  // a, b, p in year 1
  std::array<double, 3> innovation_sd{0.02, 0.02, 0.02};
  std::uint64_t seed = 1;
  int first_year = 2001;  // label of year 1

  void validate() const {
    if (years == 0) throw UsageError("simulation needs at least one year");
    if (per_year == 0) throw UsageError("simulation needs at least one observation per year");
    for (double v : initial) {
      if (!(v > 0.0) || !std::isfinite(v)) throw UsageError("initial Dagum parameters must be positive");
    }
    for (double s : innovation_sd) {
      if (!(s >= 0.0) || !std::isfinite(s)) throw UsageError("innovation standard deviations must be nonnegative");
    }
  }
};

/// Noise-free functionals of the true distribution of one year.
struct TrueYear {
  std::string year;
  double a = 0.0, b = 0.0, p = 0.0;
  double mean = 0.0;
  double gini = 0.0;
  double fgt0 = 0.0;
  double fgt1 = 0.0;
};

struct SimulatedPanel {
  Panel panel;
  LatentPath true_log_paths;  // T x 3, columns log a, log b, log p
  std::vector<TrueYear> truth;
};

inline TrueYear true_functionals(const std::string& year, const ParameterVector& par, PovertyLine line) {
  TrueYear r;
  r.year = year;
  r.a = par.a();
  r.b = par.b();
  r.p = par.p();
  const auto mu = mean(par).value;
  r.mean = mu ? *mu : std::numeric_limits<double>::quiet_NaN();
  r.gini = mu ? gini(par) : std::numeric_limits<double>::quiet_NaN();
  r.fgt0 = fgt_exact(par, line, 0);
  r.fgt1 = fgt_exact(par, line, 1);
  return r;
}

/// Draws the whole log-parameter path first, then the incomes of each year
/// by inverse-transform sampling, all from one generator seeded by config.
inline SimulatedPanel simulate_dgp(const DgpConfig& config, PovertyLine line) {
  config.validate();
  Rng rng(config.seed);
  const auto T = static_cast<Eigen::Index>(config.years);
  SimulatedPanel out;
  out.true_log_paths.resize(T, 3);
  for (Eigen::Index k = 0; k < 3; ++k) out.true_log_paths(0, k) = std::log(config.initial[static_cast<std::size_t>(k)]);
  for (Eigen::Index t = 1; t < T; ++t) {
    for (Eigen::Index k = 0; k < 3; ++k) {
      out.true_log_paths(t, k) =
          out.true_log_paths(t - 1, k) + config.innovation_sd[static_cast<std::size_t>(k)] * std_normal(rng);
    }
  }
  for (Eigen::Index t = 0; t < T; ++t) {
    const std::string label = std::to_string(config.first_year + static_cast<int>(t));
    const LatentState state = out.true_log_paths.row(t).transpose();
    const auto par = states_to_params(state, DistributionKind::Dagum);
    out.panel.years.push_back(label);
    out.panel.incomes.push_back(sample(par, config.per_year, rng));
    out.truth.push_back(true_functionals(label, par, line));
  }
  return out;
}

}  // namespace incdyn
