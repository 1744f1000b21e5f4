#pragma once

// Inequality and poverty functionals of a parametric income distribution
// (Gini, FGT class) and their posterior summaries across MCMC draws.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "incdyn/dists.hpp"
#include "incdyn/error.hpp"
#include "incdyn/mcmc.hpp"
#include "incdyn/specfun.hpp"

namespace incdyn {

/// Poverty line z > 0, in income units.
class PovertyLine {
 public:
  explicit PovertyLine(double z) : z_(z) {
    if (!(z > 0.0) || !std::isfinite(z)) throw DomainError("poverty line must be positive and finite");
  }
  double value() const { return z_; }

 private:
  double z_;
};

inline specfun::QuadratureSpec gini_quadrature() {
  specfun::QuadratureSpec spec;
  spec.absolute_tolerance = 1e-10;
  spec.relative_tolerance = 1e-10;
  spec.max_subdivisions = 2000;
  return spec;
}

/// Gini coefficient as one minus twice the area under the Lorenz curve.
inline double gini(const ParameterVector& par) {
  detail::require_mean("gini", par);
  const double area = specfun::integrate([&](double u) { return lorenz(par, u); }, 0.0, 1.0, gini_quadrature());
  return 1.0 - 2.0 * area;
}

/// Gini through the cdf/pdf form -1 + (2/mu) int_0^inf y F(y) p(y) dy.
/// Independent of the Lorenz machinery; used to cross-check gini().
inline double gini_cdf_pdf(const ParameterVector& par) {
  detail::require_mean("gini_cdf_pdf", par);
  const double mu = *mean(par).value;
  const double b = par.b();
  // Integrate in units of b so the quadrature is scale free.
  const double integral = specfun::integrate_to_infinity(
      [&](double x) {
        if (x <= 0.0) return 0.0;
        const double y = b * x;
        return y * cdf(par, y) * pdf(par, y) * b;
      },
      0.0, gini_quadrature());
  return -1.0 + 2.0 * integral / mu;
}

/// Exact FGT(alpha) for alpha in {0, 1}: headcount F(z), and poverty gap
/// F(z) - (mu/z) F^{(1)}(z). Without a finite mean the gap is evaluated as
/// (1/z) int_0^z F(y) dy.
inline double fgt_exact(const ParameterVector& par, PovertyLine line, int alpha) {
  const double z = line.value();
  if (alpha == 0) return cdf(par, z);
  if (alpha != 1) throw DomainError("fgt_exact: only alpha = 0 and alpha = 1 have exact evaluators");
  const auto mu = mean(par).value;
  if (mu) return std::max(0.0, cdf(par, z) - (*mu / z) * moment_cdf(par, 1, z));
  const double area = specfun::integrate([&](double y) { return y > 0.0 ? cdf(par, y) : 0.0; }, 0.0, z);
  return area / z;
}

struct McEstimate {
  double value = 0.0;
  double variance = 0.0;  // sample variance of the summands
  std::size_t size = 0;

  double standard_error() const { return std::sqrt(variance / static_cast<double>(size)); }
};

/// Monte Carlo FGT(alpha): mean of ((z - y)/z)^alpha 1{y < z} over draws
/// from the fitted distribution.
inline McEstimate fgt_monte_carlo(const ParameterVector& par, PovertyLine line, double alpha, std::size_t mc_size,
                                  Rng& rng) {
  if (!(alpha >= 0.0)) throw DomainError("fgt: alpha must be nonnegative");
  if (mc_size == 0) throw DomainError("fgt: mc_size must be positive");
  const double z = line.value();
  double sum = 0.0;
  double sum_sq = 0.0;
  for (std::size_t i = 0; i < mc_size; ++i) {
    const double y = quantile(par, uniform_open01(rng));
    const double v = y < z ? std::pow((z - y) / z, alpha) : 0.0;
    sum += v;
    sum_sq += v * v;
  }
  const double n = static_cast<double>(mc_size);
  const double m = sum / n;
  const double var = mc_size > 1 ? std::max(0.0, (sum_sq - n * m * m) / (n - 1.0)) : 0.0;
  return {m, var, mc_size};
}

/// FGT(alpha). The exact evaluators are used for alpha in {0, 1}; other
/// orders are estimated by Monte Carlo with mc_size draws.
inline double fgt(const ParameterVector& par, PovertyLine line, double alpha, std::size_t mc_size, Rng& rng) {
  if (alpha == 0.0) return fgt_exact(par, line, 0);
  if (alpha == 1.0) return fgt_exact(par, line, 1);
  return fgt_monte_carlo(par, line, alpha, mc_size, rng).value;
}

/// Posterior mean and equal-tailed interval.
struct Summary {
  double posterior_mean = 0.0;
  double lower = 0.0;
  double upper = 0.0;
};

/// Indices of the order statistics used as equal-tailed interval endpoints
/// for a sample of size n at the given credible level.
inline std::pair<std::size_t, std::size_t> interval_ranks(std::size_t n, double level) {
  const double tail = 0.5 * (1.0 - level);
  const double span = static_cast<double>(n - 1);
  auto lo = static_cast<std::size_t>(std::floor(tail * span + 1e-9));
  auto hi = static_cast<std::size_t>(std::ceil((1.0 - tail) * span - 1e-9));
  return {std::min(lo, n - 1), std::min(hi, n - 1)};
}

inline Summary summarize(std::vector<double> values, double level) {
  if (values.empty()) throw DomainError("summarize: empty sample");
  if (!(level > 0.0 && level < 1.0)) throw UsageError("credible level must lie in (0,1)");
  Summary s;
  s.posterior_mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  const auto [lo, hi] = interval_ranks(values.size(), level);
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(lo), values.end());
  s.lower = values[lo];
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(hi), values.end());
  s.upper = values[hi];
  // Guard the ordering against floating-point round-off in the mean of a
  // constant sample.
  s.posterior_mean = std::clamp(s.posterior_mean, s.lower, s.upper);
  return s;
}

struct WelfareRecord {
  std::string year;
  Summary mean;
  Summary gini;
  Summary fgt0;
  Summary fgt1;
  double excluded_draw_fraction = 0.0;
};

struct WelfareSeries {
  double level = 0.95;
  double poverty_line = 0.0;
  std::vector<WelfareRecord> records;
};

/// Per-draw functionals of one parameter vector. mean and gini are empty
/// when the mean does not exist.
struct DrawFunctionals {
  std::optional<double> mean;
  std::optional<double> gini;
  double fgt0 = 0.0;
  double fgt1 = 0.0;
};

inline DrawFunctionals draw_functionals(const ParameterVector& par, PovertyLine line) {
  DrawFunctionals f;
  f.mean = mean(par).value;
  if (f.mean) f.gini = gini(par);
  f.fgt0 = fgt_exact(par, line, 0);
  f.fgt1 = fgt_exact(par, line, 1);
  return f;
}

/// Posterior summaries of mean, Gini, FGT0 and FGT1 for every year.
/// Draws without a finite mean are left out of the mean and Gini summaries
/// and counted in excluded_draw_fraction; they still enter FGT0/FGT1.
inline WelfareSeries welfare_series(const DrawSet& draws, PovertyLine line, double level) {
  if (draws.num_draws() == 0) throw DomainError("welfare_series: empty draw set");
  if (!(level > 0.0 && level < 1.0)) throw UsageError("credible level must lie in (0,1)");
  WelfareSeries out;
  out.level = level;
  out.poverty_line = line.value();
  const std::size_t M = draws.num_draws();
  for (std::size_t t = 0; t < draws.num_years(); ++t) {
    std::vector<double> means, ginis, fgt0s, fgt1s;
    means.reserve(M);
    ginis.reserve(M);
    fgt0s.reserve(M);
    fgt1s.reserve(M);
    for (std::size_t m = 0; m < M; ++m) {
      const auto f = draw_functionals(draws.params(m, t), line);
      if (f.mean) {
        means.push_back(*f.mean);
        ginis.push_back(*f.gini);
      }
      fgt0s.push_back(f.fgt0);
      fgt1s.push_back(f.fgt1);
    }
    const double excluded = 1.0 - static_cast<double>(means.size()) / static_cast<double>(M);
    if (means.empty()) {
      throw DomainError("welfare_series: every draw for year " + draws.years[t] + " lacks a finite mean");
    }
    WelfareRecord r;
    r.year = draws.years[t];
    r.mean = summarize(std::move(means), level);
    r.gini = summarize(std::move(ginis), level);
    r.fgt0 = summarize(std::move(fgt0s), level);
    r.fgt1 = summarize(std::move(fgt1s), level);
    r.excluded_draw_fraction = excluded;
    out.records.push_back(r);
  }
  return out;
}

}  // namespace incdyn
